#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace league::archive {

struct Member {
    std::string name;
    std::string data;
};

bool looks_gzip(std::string_view bytes);
bool looks_pdf(std::string_view bytes);
bool looks_tar(std::string_view bytes);

// Inflates a gzip stream (zlib). Throws archive_unavailable on corrupt input.
std::string gunzip(const std::string& bytes);

// Reads a ustar/pax archive, regular files only, in archive order.
std::vector<Member> read_tar(const std::string& bytes);

// Builds a ustar archive from members (fixtures and tests).
std::string write_tar(const std::vector<Member>& members);

std::string gzip_compress(const std::string& bytes);

}  // namespace league::archive
