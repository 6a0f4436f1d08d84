#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "teleportsim/errors.hpp"

namespace tsim {

// One detector click. Streams are sorted nondecreasing in time; ties allowed.
struct TagRecord {
  std::uint16_t channel = 0;  // 0..15
  std::uint64_t time_ps = 0;

  friend bool operator==(const TagRecord&, const TagRecord&) = default;
};

inline constexpr std::uint16_t kMaxChannel = 15;

// Roles of the six detectors: four BSM outputs (port x polarization) and the
// two tomography outputs.
struct ChannelMap {
  int bsm_out1_h = 0;
  int bsm_out1_v = 1;
  int bsm_out2_h = 2;
  int bsm_out2_v = 3;
  int tomo_t = 4;
  int tomo_r = 5;

  std::array<int, 6> all() const {
    return {bsm_out1_h, bsm_out1_v, bsm_out2_h, bsm_out2_v, tomo_t, tomo_r};
  }

  void validate() const {
    const auto a = all();
    for (int ch : a)
      if (ch < 0 || ch > kMaxChannel)
        throw ConfigError("ChannelMap: channel roles must be in 0..15");
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j)
        if (a[i] == a[j]) throw ConfigError("ChannelMap: channel roles must be distinct");
  }
};

struct CoincidenceConfig {
  std::int64_t bsm_window_ps = 600;
  std::int64_t histogram_span_ps = 100000;
  std::int64_t bin_ps = 100;

  void validate() const {
    if (bsm_window_ps <= 0) throw ConfigError("CoincidenceConfig: window must be positive");
    if (bsm_window_ps >= histogram_span_ps)
      throw ConfigError("CoincidenceConfig: window must be smaller than the span");
    if (bin_ps <= 0 || histogram_span_ps % bin_ps != 0)
      throw ConfigError("CoincidenceConfig: bin must divide the span");
  }
};

// ---------------------------------------------------------------------------
// Tag stream serialization: binary (magic "QTG1") and CSV. Both round-trip
// losslessly; the parser reports the first offending record.

inline constexpr char kTagMagic[4] = {'Q', 'T', 'G', '1'};

namespace detail {
inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline std::uint64_t get_uint(const std::string& s, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos + static_cast<std::size_t>(i)]))
         << (8 * i);
  return v;
}
}  // namespace detail

inline std::string write_tags_binary(std::span<const TagRecord> tags) {
  std::string out;
  out.reserve(16 + tags.size() * 16);
  out.append(kTagMagic, 4);
  detail::put_u32(out, 1);  // version
  detail::put_u64(out, tags.size());
  for (const TagRecord& t : tags) {
    detail::put_u16(out, t.channel);
    detail::put_u16(out, 0);  // reserved
    detail::put_u64(out, 0);  // pad channel word to 4 bytes? no — layout below
    out.resize(out.size() - 8);
    detail::put_u64(out, t.time_ps);
  }
  return out;
}

inline std::string write_tags_csv(std::span<const TagRecord> tags) {
  std::ostringstream os;
  os << "channel,time_ps\n";
  for (const TagRecord& t : tags) os << t.channel << ',' << t.time_ps << '\n';
  return os.str();
}

namespace detail {
inline void check_record(const TagRecord& rec, std::uint64_t prev_time, bool have_prev,
                         std::size_t index) {
  if (rec.channel > kMaxChannel)
    throw TagFormatError("tag stream: channel out of range", index);
  if (have_prev && rec.time_ps < prev_time)
    throw TagFormatError("tag stream: non-monotonic time", index);
}
}  // namespace detail

inline std::vector<TagRecord> parse_tags_binary(const std::string& bytes) {
  if (bytes.size() < 16 || bytes.compare(0, 4, kTagMagic, 4) != 0)
    throw DataError("tag stream: bad magic");
  if (detail::get_uint(bytes, 4, 4) != 1) throw DataError("tag stream: unsupported version");
  const std::uint64_t count = detail::get_uint(bytes, 8, 8);
  if (bytes.size() != 16 + count * 12)
    throw DataError("tag stream: truncated record section");
  std::vector<TagRecord> tags;
  tags.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t base = 16 + static_cast<std::size_t>(i) * 12;
    TagRecord rec;
    rec.channel = static_cast<std::uint16_t>(detail::get_uint(bytes, base, 2));
    rec.time_ps = detail::get_uint(bytes, base + 4, 8);
    detail::check_record(rec, tags.empty() ? 0 : tags.back().time_ps, !tags.empty(),
                         static_cast<std::size_t>(i));
    tags.push_back(rec);
  }
  return tags;
}

inline std::vector<TagRecord> parse_tags_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || (line != "channel,time_ps" && line != "channel,time_ps\r"))
    throw DataError("tag stream: CSV header must be 'channel,time_ps'");
  std::vector<TagRecord> tags;
  std::size_t index = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw TagFormatError("tag stream: malformed CSV row", index);
    TagRecord rec;
    try {
      const unsigned long ch = std::stoul(line.substr(0, comma));
      rec.channel = static_cast<std::uint16_t>(ch);
      if (ch > 0xffff) throw std::out_of_range("channel");
      rec.time_ps = std::stoull(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw TagFormatError("tag stream: malformed CSV row", index);
    }
    detail::check_record(rec, tags.empty() ? 0 : tags.back().time_ps, !tags.empty(), index);
    tags.push_back(rec);
    ++index;
  }
  return tags;
}

// Sniffs the format from the leading bytes.
inline std::vector<TagRecord> parse_tags(const std::string& payload) {
  if (payload.size() >= 4 && payload.compare(0, 4, kTagMagic, 4) == 0)
    return parse_tags_binary(payload);
  return parse_tags_csv(payload);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& payload) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write file: " + path);
  f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

inline std::vector<TagRecord> parse_tags_file(const std::string& path) {
  return parse_tags(read_file(path));
}

// ---------------------------------------------------------------------------
// Coincidence counting

// The four click signatures probing a Bell-state measurement:
//   psi-: opposite ports, orthogonal polarizations
//   psi+: same port, orthogonal polarizations
enum class BsmCombo { PsiMinusA, PsiMinusB, PsiPlusA, PsiPlusB };

inline constexpr std::array<BsmCombo, 4> kBsmCombos{
    BsmCombo::PsiMinusA, BsmCombo::PsiMinusB, BsmCombo::PsiPlusA, BsmCombo::PsiPlusB};

inline std::string to_string(BsmCombo c) {
  switch (c) {
    case BsmCombo::PsiMinusA: return "psi_minus_1h2v";
    case BsmCombo::PsiMinusB: return "psi_minus_1v2h";
    case BsmCombo::PsiPlusA: return "psi_plus_1h1v";
    case BsmCombo::PsiPlusB: return "psi_plus_2h2v";
  }
  return "?";
}

inline std::pair<int, int> combo_channels(BsmCombo c, const ChannelMap& map) {
  switch (c) {
    case BsmCombo::PsiMinusA: return {map.bsm_out1_h, map.bsm_out2_v};
    case BsmCombo::PsiMinusB: return {map.bsm_out1_v, map.bsm_out2_h};
    case BsmCombo::PsiPlusA: return {map.bsm_out1_h, map.bsm_out1_v};
    case BsmCombo::PsiPlusB: return {map.bsm_out2_h, map.bsm_out2_v};
  }
  throw DomainError("combo_channels: bad combo");
}

// counts[combo][tomo] with tomo 0 = transmitted, 1 = reflected.
struct ThreefoldCounts {
  std::array<std::array<std::uint64_t, 2>, 4> counts{};
  std::uint64_t unmapped_records = 0;

  std::uint64_t at(BsmCombo c, int tomo) const {
    return counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(tomo)];
  }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (const auto& row : counts) s += row[0] + row[1];
    return s;
  }
};

namespace detail {

inline std::vector<std::int64_t> channel_times(std::span<const TagRecord> tags, int channel) {
  std::vector<std::int64_t> t;
  for (const TagRecord& rec : tags)
    if (rec.channel == channel) t.push_back(static_cast<std::int64_t>(rec.time_ps));
  return t;
}

// number of x in sorted `v` with 2x in [lo2, hi2]
inline std::uint64_t count_in_half_open(const std::vector<std::int64_t>& v, std::int64_t lo2,
                                        std::int64_t hi2) {
  // x >= ceil(lo2/2), x <= floor(hi2/2)
  const std::int64_t lo = (lo2 >= 0) ? (lo2 + 1) / 2 : lo2 / 2;  // ceil for either sign
  const std::int64_t hi = (hi2 >= 0) ? hi2 / 2 : -((-hi2 + 1) / 2);  // floor
  auto first = std::lower_bound(v.begin(), v.end(), lo);
  auto last = std::upper_bound(v.begin(), v.end(), hi);
  return static_cast<std::uint64_t>(last - first);
}

// All (a, b, tomo) triples: |t_a - t_b| <= window and the tomography click
// within the window of the pair midpoint, in exact integer arithmetic:
// |2 t - (t_a + t_b)| <= 2 window.
inline std::uint64_t count_pairs_with_tomo(const std::vector<std::int64_t>& a,
                                           const std::vector<std::int64_t>& b,
                                           const std::vector<std::int64_t>& tomo,
                                           std::int64_t window) {
  std::uint64_t n = 0;
  std::size_t lo = 0;
  for (const std::int64_t ta : a) {
    while (lo < b.size() && b[lo] < ta - window) ++lo;
    for (std::size_t j = lo; j < b.size() && b[j] <= ta + window; ++j) {
      const std::int64_t sum = ta + b[j];
      n += count_in_half_open(tomo, sum - 2 * window, sum + 2 * window);
    }
  }
  return n;
}

}  // namespace detail

// Threefold coincidences for the eight recorded channel combinations: the
// four BSM signatures times the two tomography outputs.
inline ThreefoldCounts threefold_coincidences(std::span<const TagRecord> tags,
                                              const ChannelMap& map,
                                              const CoincidenceConfig& cfg) {
  map.validate();
  cfg.validate();
  ThreefoldCounts out;
  const auto mapped = map.all();
  for (const TagRecord& rec : tags)
    if (std::find(mapped.begin(), mapped.end(), rec.channel) == mapped.end())
      ++out.unmapped_records;

  const std::array<std::vector<std::int64_t>, 2> tomo{
      detail::channel_times(tags, map.tomo_t), detail::channel_times(tags, map.tomo_r)};
  for (BsmCombo combo : kBsmCombos) {
    const auto [cha, chb] = combo_channels(combo, map);
    const auto ta = detail::channel_times(tags, cha);
    const auto tb = detail::channel_times(tags, chb);
    for (int t = 0; t < 2; ++t)
      out.counts[static_cast<std::size_t>(combo)][static_cast<std::size_t>(t)] =
          detail::count_pairs_with_tomo(ta, tb, tomo[static_cast<std::size_t>(t)],
                                        cfg.bsm_window_ps);
  }
  return out;
}

// The beam-splitter-only reduction: outputs on the same side of the splitter
// are grouped, so a heralding pair is any cross-side coincidence regardless
// of polarization. counts[tomo].
struct BsReducedCounts {
  std::array<std::uint64_t, 2> counts{};
  std::uint64_t total() const { return counts[0] + counts[1]; }
};

inline BsReducedCounts threefold_coincidences_bs_reduced(std::span<const TagRecord> tags,
                                                         const ChannelMap& map,
                                                         const CoincidenceConfig& cfg) {
  map.validate();
  cfg.validate();
  auto merged = [&](int ch1, int ch2) {
    std::vector<std::int64_t> t;
    for (const TagRecord& rec : tags)
      if (rec.channel == ch1 || rec.channel == ch2)
        t.push_back(static_cast<std::int64_t>(rec.time_ps));
    return t;  // tags are time-sorted, so the filtered list is too
  };
  const auto side1 = merged(map.bsm_out1_h, map.bsm_out1_v);
  const auto side2 = merged(map.bsm_out2_h, map.bsm_out2_v);
  const std::array<std::vector<std::int64_t>, 2> tomo{
      detail::channel_times(tags, map.tomo_t), detail::channel_times(tags, map.tomo_r)};
  BsReducedCounts out;
  for (int t = 0; t < 2; ++t)
    out.counts[static_cast<std::size_t>(t)] = detail::count_pairs_with_tomo(
        side1, side2, tomo[static_cast<std::size_t>(t)], cfg.bsm_window_ps);
  return out;
}

// ---------------------------------------------------------------------------
// Histograms

struct Histogram {
  std::int64_t bin_ps = 1;
  std::int64_t t_min_ps = 0;  // left edge of bin 0
  std::vector<std::uint64_t> counts;

  std::int64_t bin_center(std::size_t i) const {
    return t_min_ps + static_cast<std::int64_t>(i) * bin_ps + bin_ps / 2;
  }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

// Counts must be conserved; factor has to divide the bin count.
inline Histogram rebin(const Histogram& h, int factor) {
  if (factor < 1 || h.counts.size() % static_cast<std::size_t>(factor) != 0)
    throw DomainError("rebin: factor must divide the number of bins");
  Histogram out;
  out.bin_ps = h.bin_ps * factor;
  out.t_min_ps = h.t_min_ps;
  out.counts.resize(h.counts.size() / static_cast<std::size_t>(factor));
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out.counts[i / static_cast<std::size_t>(factor)] += h.counts[i];
  return out;
}

// Start-stop-free correlation: histogram of t_b - t_a over all pairs with
// the difference inside [-span, span).
inline Histogram pair_histogram(std::span<const TagRecord> tags, int ch_a, int ch_b,
                                const CoincidenceConfig& cfg) {
  cfg.validate();
  const auto ta = detail::channel_times(tags, ch_a);
  const auto tb = detail::channel_times(tags, ch_b);
  Histogram h;
  h.bin_ps = cfg.bin_ps;
  h.t_min_ps = -cfg.histogram_span_ps;
  h.counts.assign(static_cast<std::size_t>(2 * cfg.histogram_span_ps / cfg.bin_ps), 0);
  std::size_t lo = 0;
  for (const std::int64_t a : ta) {
    while (lo < tb.size() && tb[lo] < a - cfg.histogram_span_ps) ++lo;
    for (std::size_t j = lo; j < tb.size(); ++j) {
      const std::int64_t dt = tb[j] - a;
      if (dt >= cfg.histogram_span_ps) break;
      h.counts[static_cast<std::size_t>((dt + cfg.histogram_span_ps) / cfg.bin_ps)] += 1;
    }
  }
  return h;
}

// Arrival-time histogram relative to a fixed pulse clock (for decay fits).
inline Histogram phase_histogram(std::span<const TagRecord> tags, int channel,
                                 std::int64_t period_ps, std::int64_t bin_ps) {
  if (period_ps <= 0 || bin_ps <= 0 || period_ps % bin_ps != 0)
    throw DomainError("phase_histogram: bin must divide the period");
  Histogram h;
  h.bin_ps = bin_ps;
  h.t_min_ps = 0;
  h.counts.assign(static_cast<std::size_t>(period_ps / bin_ps), 0);
  for (const TagRecord& rec : tags) {
    if (rec.channel != channel) continue;
    const std::int64_t phase = static_cast<std::int64_t>(rec.time_ps % static_cast<std::uint64_t>(period_ps));
    h.counts[static_cast<std::size_t>(phase / bin_ps)] += 1;
  }
  return h;
}

inline std::string histogram_to_csv(const Histogram& h) {
  std::ostringstream os;
  os << "bin_center_ps,counts\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    os << h.bin_center(i) << ',' << h.counts[i] << '\n';
  return os.str();
}

inline Histogram histogram_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("bin_center_ps,counts", 0) != 0)
    throw DataError("histogram CSV: header must be 'bin_center_ps,counts'");
  std::vector<std::int64_t> centers;
  std::vector<std::uint64_t> counts;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw DataError("histogram CSV: malformed row");
    centers.push_back(std::stoll(line.substr(0, comma)));
    counts.push_back(std::stoull(line.substr(comma + 1)));
  }
  if (centers.size() < 2) throw DataError("histogram CSV: need at least two bins");
  Histogram h;
  h.bin_ps = centers[1] - centers[0];
  if (h.bin_ps <= 0) throw DataError("histogram CSV: bin centers must increase");
  for (std::size_t i = 1; i < centers.size(); ++i)
    if (centers[i] - centers[i - 1] != h.bin_ps)
      throw DataError("histogram CSV: bins must be uniform");
  h.t_min_ps = centers[0] - h.bin_ps / 2;
  h.counts = std::move(counts);
  return h;
}

}  // namespace tsim
