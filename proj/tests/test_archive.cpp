#include <doctest.h>

#include <random>

#include "league/archive.hpp"
#include "league/errors.hpp"

using namespace league;

TEST_CASE("tar round-trip preserves members in archive order") {
    std::vector<archive::Member> members = {
        {"main.tex", "\\documentclass{article}\n"},
        {"sections/tables.tex", std::string(2000, 'x')},
        {"refs.bib", "@article{a}"},
    };
    auto bytes = archive::write_tar(members);
    CHECK(archive::looks_tar(bytes));
    auto back = archive::read_tar(bytes);
    REQUIRE(back.size() == 3);
    for (size_t i = 0; i < members.size(); ++i) {
        CHECK(back[i].name == members[i].name);
        CHECK(back[i].data == members[i].data);
    }
}

TEST_CASE("gzip round-trip") {
    std::mt19937 rng(7);
    std::string payload;
    for (int i = 0; i < 50000; ++i) payload.push_back(static_cast<char>(rng() % 256));
    auto compressed = archive::gzip_compress(payload);
    CHECK(archive::looks_gzip(compressed));
    CHECK(archive::gunzip(compressed) == payload);
}

TEST_CASE("corrupt gzip raises an archive error") {
    std::string junk = "\x1f\x8b garbage";
    CHECK_THROWS_AS(archive::gunzip(junk), Error);
}

TEST_CASE("pdf sniffing") {
    CHECK(archive::looks_pdf("%PDF-1.5 blah"));
    CHECK_FALSE(archive::looks_pdf("\\documentclass"));
}
