#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "eegaug/errors.hpp"
#include "eegaug/trial.hpp"

namespace eegaug {

// EEGT binary trial container, little-endian:
//   magic "EEGT" | version u32=1 | paradigm u8 | class_count u16
//   | C u32 | T u32 | fs f64 | n_subjects u32 | n_trials u32
//   | per trial: subject u32, label u16, samples f32 row-major [channel][time]
// A montage-config sidecar with the same stem and the ".montage" extension
// binds the montage.

namespace detail {

template <typename T>
inline void put_le(std::string& out, T v) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) {
  put_le(out, std::bit_cast<std::uint32_t>(v));
}

inline void put_f64(std::string& out, double v) {
  put_le(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  Reader(const std::string& buf, std::string origin)
      : buf_(buf), origin_(std::move(origin)) {}

  template <typename T>
  T get_le() {
    static_assert(std::is_integral_v<T>);
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  float get_f32() { return std::bit_cast<float>(get_le<std::uint32_t>()); }
  double get_f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool exhausted() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > buf_.size())
      throw DataError(origin_ + ": truncated payload (header promises more data)");
  }
  const std::string& buf_;
  std::string origin_;
  std::size_t pos_{0};
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& eegt_path) {
  std::filesystem::path p = eegt_path;
  p.replace_extension(".montage");
  return p;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

inline void spew(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open file for writing: " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace detail

// Serializes a TrialSet to the EEGT byte layout. All trials must share one
// sample count; the format stores a single T.
inline std::string encode_trialset(const TrialSet& set) {
  validate_trialset(set);
  if (set.trials.empty()) throw DataError("refusing to encode empty trial set");
  const Eigen::Index c = set.trials[0].channel_count();
  const Eigen::Index t = set.trials[0].sample_count();
  for (const Trial& tr : set.trials)
    if (tr.sample_count() != t)
      throw DataError("EEGT requires a uniform sample count across trials");

  std::string out;
  out.reserve(32 + set.trials.size() * (6 + static_cast<std::size_t>(c * t) * 4));
  out += "EEGT";
  detail::put_le<std::uint32_t>(out, 1);
  detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(set.paradigm));
  detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(set.class_count));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t));
  detail::put_f64(out, set.trials[0].fs);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(subject_ids(set).size()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.trials.size()));
  for (const Trial& tr : set.trials) {
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tr.subject));
    detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(tr.label));
    for (Eigen::Index ch = 0; ch < c; ++ch)
      for (Eigen::Index s = 0; s < t; ++s)
        detail::put_f32(out, static_cast<float>(tr.samples(ch, s)));
  }
  return out;
}

// Parses EEGT bytes and validates every TrialSet invariant. The montage is
// supplied separately (it travels in the sidecar).
inline TrialSet decode_trialset(const std::string& bytes, Montage montage,
                                const std::string& origin = "EEGT") {
  detail::Reader r(bytes, origin);
  if (r.get_bytes(4) != "EEGT") throw DataError(origin + ": bad magic");
  const auto version = r.get_le<std::uint32_t>();
  if (version != 1)
    throw DataError(origin + ": unsupported version " + std::to_string(version));
  TrialSet set;
  set.montage = std::move(montage);
  const auto paradigm_raw = r.get_le<std::uint8_t>();
  if (paradigm_raw > static_cast<std::uint8_t>(Paradigm::SEIZURE))
    throw DataError(origin + ": unknown paradigm code");
  set.paradigm = static_cast<Paradigm>(paradigm_raw);
  set.class_count = r.get_le<std::uint16_t>();
  const auto c = r.get_le<std::uint32_t>();
  const auto t = r.get_le<std::uint32_t>();
  const double fs = r.get_f64();
  const auto n_subjects = r.get_le<std::uint32_t>();
  const auto n_trials = r.get_le<std::uint32_t>();
  if (c != set.montage.channel_count())
    throw DataError(origin + ": channel count disagrees with montage sidecar");
  set.trials.reserve(n_trials);
  for (std::uint32_t i = 0; i < n_trials; ++i) {
    Trial tr;
    tr.subject = static_cast<int>(r.get_le<std::uint32_t>());
    tr.label = r.get_le<std::uint16_t>();
    tr.fs = fs;
    tr.samples.resize(c, t);
    for (std::uint32_t ch = 0; ch < c; ++ch)
      for (std::uint32_t s = 0; s < t; ++s)
        tr.samples(ch, s) = static_cast<double>(r.get_f32());
    set.trials.push_back(std::move(tr));
  }
  if (!r.exhausted()) throw DataError(origin + ": trailing bytes after payload");
  if (subject_ids(set).size() != n_subjects)
    throw DataError(origin + ": subject count disagrees with header");
  validate_trialset(set);
  return set;
}

// Writes <path> and the montage sidecar <stem>.montage.
inline void write_trialset(const TrialSet& set, const std::filesystem::path& path) {
  detail::spew(path, encode_trialset(set));
  detail::spew(detail::sidecar_path(path), render_montage(set.montage));
}

// Reads <path> together with its montage sidecar.
inline TrialSet read_trialset(const std::filesystem::path& path) {
  const auto sidecar = detail::sidecar_path(path);
  if (!std::filesystem::exists(sidecar))
    throw DataError("missing montage sidecar: " + sidecar.string());
  Montage montage = parse_montage(detail::slurp(sidecar));
  return decode_trialset(detail::slurp(path), std::move(montage), path.string());
}

}  // namespace eegaug
