#include "ulab/cache.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace ulab {

namespace {

void put_u32(std::string& b, uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back((char)((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& b, uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back((char)((v >> (8 * i)) & 0xff));
}
uint32_t get_u32(const unsigned char* p) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= (uint32_t)p[i] << (8 * i);
    return v;
}
uint64_t get_u64(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= (uint64_t)p[i] << (8 * i);
    return v;
}

const char* kind_name(MultKind k) {
    switch (k) {
        case MultKind::liouville: return "liouville";
        case MultKind::moebius: return "moebius";
        case MultKind::von_mangoldt: return "von_mangoldt";
        default: return nullptr;
    }
}

}  // namespace

std::string resolve_cache_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    const char* env = std::getenv("ULAB_CACHE");
    return env ? std::string(env) : std::string();
}

std::optional<std::string> cache_file_name(const MultSpec& spec, long long start, long long end) {
    const char* name = kind_name(spec.kind);
    if (!name) return std::nullopt;
    return std::string(name) + "_" + std::to_string(start) + "_" + std::to_string(end) + ".ulab";
}

void save_table(const FunctionTable& t, const std::string& path) {
    if (!kind_name(t.spec.kind)) throw std::invalid_argument("save_table: kind not cacheable");
    std::string header = "ULAB";
    put_u32(header, kCacheVersion);
    put_u64(header, (uint64_t)t.start);
    put_u64(header, (uint64_t)t.end);
    header.push_back((char)(uint8_t)t.spec.kind);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cache: cannot open for writing: " + path);
    f.write(header.data(), (std::streamsize)header.size());
    if (t.store == FunctionTable::Storage::i8) {
        f.write((const char*)t.vb.data(), (std::streamsize)t.vb.size());
    } else {
        // f64 payload written as-is; this code targets little-endian hosts
        f.write((const char*)t.vd.data(), (std::streamsize)(t.vd.size() * sizeof(double)));
    }
    if (!f) throw std::runtime_error("cache: write failed: " + path);
}

FunctionTable load_table(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cache: cannot open: " + path);
    unsigned char header[4 + 4 + 8 + 8 + 1];
    f.read((char*)header, sizeof(header));
    if (!f) throw std::runtime_error("cache corruption: truncated header in " + path);
    if (std::memcmp(header, "ULAB", 4) != 0)
        throw std::runtime_error("cache corruption: magic mismatch in " + path);
    uint32_t version = get_u32(header + 4);
    if (version != kCacheVersion)
        throw std::runtime_error("cache corruption: unsupported version in " + path);
    FunctionTable t;
    t.start = (long long)get_u64(header + 8);
    t.end = (long long)get_u64(header + 16);
    uint8_t kind = header[24];
    if (kind > (uint8_t)MultKind::von_mangoldt)
        throw std::runtime_error("cache corruption: bad kind byte in " + path);
    t.spec.kind = (MultKind)kind;
    size_t n = (size_t)(t.end - t.start + 1);
    if (t.spec.kind == MultKind::von_mangoldt) {
        t.store = FunctionTable::Storage::f64;
        t.vd.resize(n);
        f.read((char*)t.vd.data(), (std::streamsize)(n * sizeof(double)));
    } else {
        t.store = FunctionTable::Storage::i8;
        t.vb.resize(n);
        f.read((char*)t.vb.data(), (std::streamsize)n);
    }
    if (!f) throw std::runtime_error("cache corruption: truncated payload in " + path);
    return t;
}

FunctionTable cached_table(const MultSpec& spec, long long start, long long end, const std::string& cache_dir) {
    auto name = cache_file_name(spec, start, end);
    if (cache_dir.empty() || !name) return sieve_table(spec, start, end);
    std::filesystem::path p = std::filesystem::path(cache_dir) / *name;
    if (std::filesystem::exists(p)) {
        FunctionTable t = load_table(p.string());
        if (t.start != start || t.end != end)
            throw std::runtime_error("cache corruption: range mismatch in " + p.string());
        return t;
    }
    FunctionTable t = sieve_table(spec, start, end);
    std::filesystem::create_directories(p.parent_path());
    save_table(t, p.string());
    return t;
}

}  // namespace ulab
