#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fsq/filter.hpp"

namespace fsq {

namespace {

constexpr std::array<char, 4> kMagic{'F', 'S', 'Q', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFU);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("filter cache: truncated file");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_filter(const FilterPair& fp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("filter cache: cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, fp.n);
  put_le<std::uint64_t>(out, fp.buckets);
  put_le<double>(out, fp.delta);
  put_le<double>(out, fp.alpha);
  put_le<double>(out, fp.smoothing);
  put_le<std::uint64_t>(out, fp.taps.size());
  for (const auto& tap : fp.taps) {
    put_le<std::int64_t>(out, tap.t);
    put_le<double>(out, tap.value);
  }
  if (!out) throw std::runtime_error("filter cache: write failed for " + path.string());
}

FilterPair read_filter(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("filter cache: cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("filter cache: bad magic in " + path.string());
  if (get_le<std::uint32_t>(in) != kVersion) throw std::runtime_error("filter cache: unsupported version");

  FilterPair fp;
  fp.n = get_le<std::uint64_t>(in);
  fp.buckets = get_le<std::uint64_t>(in);
  fp.delta = get_le<double>(in);
  fp.alpha = get_le<double>(in);
  fp.smoothing = get_le<double>(in);
  if (!is_power_of_two(fp.n) || fp.buckets < 2 || fp.n % fp.buckets != 0) {
    throw std::runtime_error("filter cache: inconsistent header in " + path.string());
  }
  fp.box_half_width = (1.0 - fp.alpha / 2.0) * fp.stop_edge();
  const auto count = get_le<std::uint64_t>(in);
  if (count > fp.n) throw std::runtime_error("filter cache: support larger than n");
  fp.taps.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto t = get_le<std::int64_t>(in);
    const auto v = get_le<double>(in);
    fp.taps.push_back({t, v});
  }
  fp.full_support = count == fp.n;
  return fp;
}

FilterCache::FilterCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  if (!directory_.empty()) std::filesystem::create_directories(directory_);
}

std::filesystem::path FilterCache::file_for(const Key& key) const {
  std::ostringstream name;
  name << "filter_n" << std::get<0>(key) << "_B" << std::get<1>(key) << "_d"
       << std::bit_cast<std::uint64_t>(std::get<2>(key)) << "_a"
       << std::bit_cast<std::uint64_t>(std::get<3>(key)) << ".bin";
  return directory_ / name.str();
}

std::shared_ptr<const FilterPair> FilterCache::get(std::uint64_t n, std::uint64_t buckets, double delta,
                                                   double alpha) {
  const Key key{n, buckets, delta, alpha};
  std::lock_guard lock(mutex_);
  if (const auto it = filters_.find(key); it != filters_.end()) return it->second;

  std::shared_ptr<const FilterPair> fp;
  if (!directory_.empty() && std::filesystem::exists(file_for(key))) {
    auto loaded = read_filter(file_for(key));
    const auto check = check_filter(loaded, 0);
    loaded.measured_leakage = check.max_leakage;
    loaded.verification = FilterVerification::Spot;
    if (check.passed(delta)) fp = std::make_shared<const FilterPair>(std::move(loaded));
  }
  if (!fp) {
    fp = std::make_shared<const FilterPair>(build_filter(n, buckets, delta, alpha));
    ++builds_;
    if (!directory_.empty()) write_filter(*fp, file_for(key));
  }
  filters_.emplace(key, fp);
  return fp;
}

std::size_t FilterCache::builds() const {
  std::lock_guard lock(mutex_);
  return builds_;
}

std::size_t FilterCache::size() const {
  std::lock_guard lock(mutex_);
  return filters_.size();
}

}  // namespace fsq
