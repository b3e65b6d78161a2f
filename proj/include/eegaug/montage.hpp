#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eegaug/errors.hpp"

namespace eegaug {

enum class ChannelKind { Unipolar, Bipolar };

// A single recorded channel: either an electrode referenced to a common
// reference ("C3") or a bipolar derivation between two adjacent electrodes
// ("Fp1-F3"). Name matching is exact and case-sensitive everywhere.
struct ChannelId {
  std::string name;
  ChannelKind kind{ChannelKind::Unipolar};

  bool operator==(const ChannelId&) const = default;
};

// Electrode layout plus the left/right symmetry structure. `left[k]` and
// `right[k]` are positional mirror partners; `midline` holds everything
// else. Indices refer to channel order, which is also the row order of
// trial sample matrices. Immutable after construction; safe to share
// across threads.
struct Montage {
  std::vector<ChannelId> channels;
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  std::vector<std::size_t> midline;

  std::size_t channel_count() const { return channels.size(); }
  std::size_t pair_count() const { return left.size(); }

  bool operator==(const Montage&) const = default;
};

namespace detail {

inline void validate_channel_name(const std::string& name, ChannelKind kind) {
  if (name.empty()) throw ConfigError("empty channel name");
  const auto dash_count = std::count(name.begin(), name.end(), '-');
  if (kind == ChannelKind::Unipolar) {
    if (dash_count != 0)
      throw ConfigError("unipolar channel name must not contain '-': " + name);
  } else {
    const auto pos = name.find('-');
    if (dash_count != 1 || pos == 0 || pos == name.size() - 1)
      throw ConfigError(
          "bipolar channel name must be '<a>-<b>' with exactly one '-': " + name);
  }
}

}  // namespace detail

// Validates all Montage invariants: well-formed names, unique names,
// left/right of equal length, and {left, right, midline} partitioning the
// channel index range. Throws ConfigError otherwise.
inline void validate_montage(const Montage& m) {
  const std::size_t c = m.channels.size();
  std::set<std::string> names;
  for (const auto& ch : m.channels) {
    detail::validate_channel_name(ch.name, ch.kind);
    if (!names.insert(ch.name).second)
      throw ConfigError("duplicate channel name: " + ch.name);
  }
  if (m.left.size() != m.right.size())
    throw ConfigError("left/right channel lists have unequal length");

  std::vector<int> seen(c, 0);
  auto mark = [&](const std::vector<std::size_t>& idx, const char* which) {
    for (std::size_t i : idx) {
      if (i >= c) throw ConfigError(std::string("channel index out of range in ") + which);
      if (seen[i]++)
        throw ConfigError("channel assigned to more than one group: " +
                          m.channels[i].name);
    }
  };
  mark(m.left, "left");
  mark(m.right, "right");
  mark(m.midline, "midline");
  for (std::size_t i = 0; i < c; ++i)
    if (!seen[i])
      throw ConfigError("channel in no group (montage is not a partition): " +
                        m.channels[i].name);
}

// Builds a montage from an ordered channel list and pairs given by name.
// Midline is derived as the complement of the paired channels.
inline Montage make_montage(std::vector<ChannelId> channels,
                            const std::vector<std::pair<std::string, std::string>>& pairs) {
  Montage m;
  m.channels = std::move(channels);
  auto index_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < m.channels.size(); ++i)
      if (m.channels[i].name == name) return i;
    throw ConfigError("pair references unknown channel: " + name);
  };
  for (const auto& [l, r] : pairs) {
    m.left.push_back(index_of(l));
    m.right.push_back(index_of(r));
  }
  std::vector<bool> paired(m.channels.size(), false);
  for (std::size_t i : m.left) paired[i] = true;
  for (std::size_t i : m.right) paired[i] = true;
  for (std::size_t i = 0; i < m.channels.size(); ++i)
    if (!paired[i]) m.midline.push_back(i);
  validate_montage(m);
  return m;
}

// Parses the montage-config document format:
//   channel <name> <unipolar|bipolar>
//   pair <leftname> <rightname>
// '#' starts a comment; blank lines are ignored. Channel order is
// declaration order.
inline Montage parse_montage(const std::string& text) {
  std::vector<ChannelId> channels;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    auto fail = [&](const std::string& msg) {
      throw ConfigError("montage-config line " + std::to_string(lineno) + ": " + msg);
    };
    if (tok == "channel") {
      std::string name, kind;
      if (!(ls >> name >> kind)) fail("expected 'channel <name> <unipolar|bipolar>'");
      ChannelKind k;
      if (kind == "unipolar")
        k = ChannelKind::Unipolar;
      else if (kind == "bipolar")
        k = ChannelKind::Bipolar;
      else
        fail("unknown channel kind '" + kind + "'");
      channels.push_back({name, k});
    } else if (tok == "pair") {
      std::string l, r;
      if (!(ls >> l >> r)) fail("expected 'pair <leftname> <rightname>'");
      pairs.emplace_back(l, r);
    } else {
      fail("unknown directive '" + tok + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing token '" + extra + "'");
  }
  return make_montage(std::move(channels), pairs);
}

// Emits the canonical montage-config form: channels first in row order,
// pairs second, no comments. parse_montage(render_montage(m)) == m.
inline std::string render_montage(const Montage& m) {
  std::ostringstream out;
  for (const auto& ch : m.channels)
    out << "channel " << ch.name << ' '
        << (ch.kind == ChannelKind::Unipolar ? "unipolar" : "bipolar") << '\n';
  for (std::size_t k = 0; k < m.left.size(); ++k)
    out << "pair " << m.channels[m.left[k]].name << ' '
        << m.channels[m.right[k]].name << '\n';
  return out.str();
}

// The left<->right exchange permutation: pi(left_k) = right_k,
// pi(right_k) = left_k, pi(c) = c for midline channels. An involution by
// construction. Montages without pairs are rejected: the reflection is
// undefined there.
inline std::vector<std::size_t> reflection_permutation(const Montage& m) {
  if (m.pair_count() == 0) throw PairlessMontageError();
  std::vector<std::size_t> pi(m.channel_count());
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = i;
  for (std::size_t k = 0; k < m.left.size(); ++k) {
    pi[m.left[k]] = m.right[k];
    pi[m.right[k]] = m.left[k];
  }
  return pi;
}

// The eight built-in dataset montages.
enum class DatasetId { MiI, MiII, MiIII, Ssvep, P300I, P300II, SeizureI, SeizureII };

inline const char* to_string(DatasetId id) {
  switch (id) {
    case DatasetId::MiI: return "MI-I";
    case DatasetId::MiII: return "MI-II";
    case DatasetId::MiIII: return "MI-III";
    case DatasetId::Ssvep: return "SSVEP";
    case DatasetId::P300I: return "P300-I";
    case DatasetId::P300II: return "P300-II";
    case DatasetId::SeizureI: return "Seizure-I";
    case DatasetId::SeizureII: return "Seizure-II";
  }
  return "?";
}

inline DatasetId dataset_id_from_string(const std::string& s) {
  for (DatasetId id : {DatasetId::MiI, DatasetId::MiII, DatasetId::MiIII,
                       DatasetId::Ssvep, DatasetId::P300I, DatasetId::P300II,
                       DatasetId::SeizureI, DatasetId::SeizureII})
    if (s == to_string(id)) return id;
  throw ConfigError("unknown dataset id: " + s);
}

namespace detail {

inline Montage build_unipolar(std::vector<std::string> names,
                              std::vector<std::pair<std::string, std::string>> pairs) {
  std::vector<ChannelId> channels;
  channels.reserve(names.size());
  for (auto& n : names) channels.push_back({std::move(n), ChannelKind::Unipolar});
  return make_montage(std::move(channels), pairs);
}

inline Montage build_bipolar(std::vector<std::string> names,
                             std::vector<std::pair<std::string, std::string>> pairs) {
  std::vector<ChannelId> channels;
  channels.reserve(names.size());
  for (auto& n : names) channels.push_back({std::move(n), ChannelKind::Bipolar});
  return make_montage(std::move(channels), pairs);
}

}  // namespace detail

// Montages of the eight datasets. The left/right pair lists follow each
// dataset's documented symmetric electrode enumeration, in that order; the
// remaining recorded channels are midline.
inline Montage builtin_montage(DatasetId id) {
  using P = std::pair<std::string, std::string>;
  switch (id) {
    case DatasetId::MiI:
      // 22 channels, 8 pairs, 6 midline.
      return detail::build_unipolar(
          {"Fz", "FC3", "FC1", "FCz", "FC2", "FC4", "C5", "C3", "C1", "Cz",
           "C2", "C4", "C6", "CP3", "CP1", "CPz", "CP2", "CP4", "P1", "Pz",
           "P2", "POz"},
          {P{"FC3", "FC4"}, P{"FC1", "FC2"}, P{"C5", "C6"}, P{"C3", "C4"},
           P{"C1", "C2"}, P{"CP3", "CP4"}, P{"CP1", "CP2"}, P{"P1", "P2"}});
    case DatasetId::MiII:
      return detail::build_unipolar({"C3", "Cz", "C4"}, {P{"C3", "C4"}});
    case DatasetId::MiIII:
      // 59 channels, 27 pairs, 5 midline.
      return detail::build_unipolar(
          {"AF3",  "AF4",  "F5",   "F3",   "F1",   "Fz",   "F2",   "F4",
           "F6",   "FC5",  "FC3",  "FC1",  "FCz",  "FC2",  "FC4",  "FC6",
           "CFC7", "CFC5", "CFC3", "CFC1", "CFC2", "CFC4", "CFC6", "CFC8",
           "T7",   "C5",   "C3",   "C1",   "Cz",   "C2",   "C4",   "C6",
           "T8",   "CCP7", "CCP5", "CCP3", "CCP1", "CCP2", "CCP4", "CCP6",
           "CCP8", "CP5",  "CP3",  "CP1",  "CPz",  "CP2",  "CP4",  "CP6",
           "P5",   "P3",   "P1",   "Pz",   "P2",   "P4",   "P6",   "PO1",
           "PO2",  "O1",   "O2"},
          {P{"AF3", "AF4"},   P{"F5", "F6"},     P{"F3", "F4"},
           P{"F1", "F2"},     P{"FC5", "FC6"},   P{"FC3", "FC4"},
           P{"FC1", "FC2"},   P{"CFC7", "CFC8"}, P{"CFC5", "CFC6"},
           P{"CFC3", "CFC4"}, P{"CFC1", "CFC2"}, P{"T7", "T8"},
           P{"C5", "C6"},     P{"C3", "C4"},     P{"C1", "C2"},
           P{"CCP7", "CCP8"}, P{"CCP5", "CCP6"}, P{"CCP3", "CCP4"},
           P{"CCP1", "CCP2"}, P{"CP5", "CP6"},   P{"CP3", "CP4"},
           P{"CP1", "CP2"},   P{"P5", "P6"},     P{"P3", "P4"},
           P{"P1", "P2"},     P{"PO1", "PO2"},   P{"O1", "O2"}});
    case DatasetId::Ssvep:
      return detail::build_unipolar(
          {"P7", "P3", "Pz", "P4", "P8", "O1", "Oz", "O2"},
          {P{"P7", "P8"}, P{"P3", "P4"}, P{"O1", "O2"}});
    case DatasetId::P300I:
      return detail::build_unipolar(
          {"Fz", "Cz", "P3", "Pz", "P4", "PO7", "PO8", "Oz"},
          {P{"P3", "P4"}, P{"PO7", "PO8"}});
    case DatasetId::P300II:
      return detail::build_unipolar(
          {"Fz", "F3", "F4", "Cz", "C3", "C4", "CPz", "CP3", "CP4", "Pz",
           "P3", "P4", "POz", "PO7", "PO8", "Oz"},
          {P{"F3", "F4"}, P{"C3", "C4"}, P{"CP3", "CP4"}, P{"P3", "P4"},
           P{"PO7", "PO8"}});
    case DatasetId::SeizureI:
    case DatasetId::SeizureII:
      // 18 bipolar derivations (double banana), 8 pairs, 2 midline.
      return detail::build_bipolar(
          {"Fp1-F7", "F7-T3", "T3-T5", "T5-O1", "Fp2-F8", "F8-T4", "T4-T6",
           "T6-O2", "Fp1-F3", "F3-C3", "C3-P3", "P3-O1", "Fp2-F4", "F4-C4",
           "C4-P4", "P4-O2", "Fz-Cz", "Cz-Pz"},
          {P{"Fp1-F3", "Fp2-F4"}, P{"F3-C3", "F4-C4"}, P{"C3-P3", "C4-P4"},
           P{"P3-O1", "P4-O2"}, P{"Fp1-F7", "Fp2-F8"}, P{"F7-T3", "F8-T4"},
           P{"T3-T5", "T4-T6"}, P{"T5-O1", "T6-O2"}});
  }
  throw ConfigError("unknown dataset id");
}

inline std::vector<DatasetId> all_dataset_ids() {
  return {DatasetId::MiI,   DatasetId::MiII,   DatasetId::MiIII,
          DatasetId::Ssvep, DatasetId::P300I,  DatasetId::P300II,
          DatasetId::SeizureI, DatasetId::SeizureII};
}

}  // namespace eegaug
