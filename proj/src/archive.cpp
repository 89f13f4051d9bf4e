#include "league/archive.hpp"

#include <zlib.h>

#include <cstring>

#include "league/errors.hpp"

namespace league::archive {

bool looks_gzip(std::string_view bytes) {
    return bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
           static_cast<unsigned char>(bytes[1]) == 0x8b;
}

bool looks_pdf(std::string_view bytes) { return bytes.substr(0, 5) == "%PDF-"; }

bool looks_tar(std::string_view bytes) {
    if (bytes.size() < 512) return false;
    if (bytes.substr(257, 5) == "ustar") return true;
    // Pre-POSIX tar: verify the header checksum instead.
    unsigned long stored = 0;
    if (std::sscanf(std::string(bytes.substr(148, 8)).c_str(), "%lo", &stored) != 1) return false;
    unsigned long sum = 0;
    for (size_t i = 0; i < 512; ++i) {
        sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(bytes[i]);
    }
    return sum == stored;
}

std::string gunzip(const std::string& bytes) {
    z_stream zs{};
    // 16+MAX_WBITS selects gzip decoding.
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
        raise(ErrorCode::archive_unavailable, "zlib init failed");
    }
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
    zs.avail_in = static_cast<uInt>(bytes.size());

    std::string out;
    char buf[1 << 15];
    int rc = Z_OK;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            raise(ErrorCode::archive_unavailable, "corrupt gzip stream");
        }
        out.append(buf, sizeof(buf) - zs.avail_out);
    } while (rc != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

std::string gzip_compress(const std::string& bytes) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_SPEED, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        raise(ErrorCode::io_error, "zlib deflate init failed");
    }
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
    zs.avail_in = static_cast<uInt>(bytes.size());

    std::string out;
    char buf[1 << 15];
    int rc = Z_OK;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof(buf);
        rc = deflate(&zs, Z_FINISH);
        out.append(buf, sizeof(buf) - zs.avail_out);
    } while (rc == Z_OK);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) raise(ErrorCode::io_error, "gzip compression failed");
    return out;
}

namespace {

unsigned long long parse_octal(const char* field, size_t n) {
    unsigned long long v = 0;
    for (size_t i = 0; i < n && field[i]; ++i) {
        if (field[i] == ' ') continue;
        if (field[i] < '0' || field[i] > '7') break;
        v = v * 8 + static_cast<unsigned long long>(field[i] - '0');
    }
    return v;
}

bool zero_block(const char* p) {
    for (size_t i = 0; i < 512; ++i) {
        if (p[i] != 0) return false;
    }
    return true;
}

}  // namespace

std::vector<Member> read_tar(const std::string& bytes) {
    std::vector<Member> members;
    size_t off = 0;
    std::string pending_long_name;
    while (off + 512 <= bytes.size()) {
        const char* hdr = bytes.data() + off;
        if (zero_block(hdr)) break;
        std::string name(hdr, strnlen(hdr, 100));
        // ustar prefix field extends the name.
        std::string prefix(hdr + 345, strnlen(hdr + 345, 155));
        if (!prefix.empty()) name = prefix + "/" + name;
        unsigned long long size = parse_octal(hdr + 124, 12);
        char type = hdr[156];
        off += 512;
        if (off + size > bytes.size()) {
            raise(ErrorCode::archive_unavailable, "truncated tar archive");
        }
        std::string data = bytes.substr(off, size);
        off += (size + 511) / 512 * 512;

        if (type == 'L') {  // GNU long name extension
            pending_long_name = data.c_str();
            continue;
        }
        if (type == '0' || type == 0) {
            if (!pending_long_name.empty()) {
                name = pending_long_name;
                pending_long_name.clear();
            }
            members.push_back({std::move(name), std::move(data)});
        } else {
            pending_long_name.clear();
        }
    }
    return members;
}

std::string write_tar(const std::vector<Member>& members) {
    std::string out;
    for (const auto& m : members) {
        char hdr[512];
        std::memset(hdr, 0, sizeof(hdr));
        std::snprintf(hdr, 100, "%s", m.name.c_str());
        std::snprintf(hdr + 100, 8, "%07o", 0644);
        std::snprintf(hdr + 108, 8, "%07o", 0);
        std::snprintf(hdr + 116, 8, "%07o", 0);
        std::snprintf(hdr + 124, 12, "%011lo", static_cast<unsigned long>(m.data.size()));
        std::snprintf(hdr + 136, 12, "%011o", 0);
        hdr[156] = '0';
        std::memcpy(hdr + 257, "ustar", 5);
        hdr[263] = '0';
        hdr[264] = '0';
        std::memset(hdr + 148, ' ', 8);
        unsigned long sum = 0;
        for (size_t i = 0; i < 512; ++i) sum += static_cast<unsigned char>(hdr[i]);
        std::snprintf(hdr + 148, 8, "%06lo", sum);
        hdr[155] = ' ';
        out.append(hdr, 512);
        out.append(m.data);
        size_t pad = (512 - m.data.size() % 512) % 512;
        out.append(pad, '\0');
    }
    out.append(1024, '\0');
    return out;
}

}  // namespace league::archive
