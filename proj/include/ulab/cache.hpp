#pragma once

#include <optional>
#include <string>

#include "ulab/mult_sieve.hpp"

namespace ulab {

// Binary table cache.  Little-endian layout:
//   magic "ULAB" | version u32 | start u64 | end u64 | kind u8 | raw values
// Values are int8 for liouville/moebius and f64 for von Mangoldt; twisted
// and custom tables are cheap to rebuild and are not cached.

inline constexpr uint32_t kCacheVersion = 1;

// Cache directory resolution: explicit flag beats the ULAB_CACHE environment
// variable; empty result disables caching.
std::string resolve_cache_dir(const std::string& flag_value);

// Canonical file name for a cacheable spec, or nullopt if not cacheable.
std::optional<std::string> cache_file_name(const MultSpec& spec, long long start, long long end);

void save_table(const FunctionTable& t, const std::string& path);

// Throws std::runtime_error on magic/version mismatch ("cache corruption").
FunctionTable load_table(const std::string& path);

// Load-or-build convenience used by the CLI; builds and saves on miss.
FunctionTable cached_table(const MultSpec& spec, long long start, long long end, const std::string& cache_dir);

}  // namespace ulab
