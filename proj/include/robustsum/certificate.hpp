#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robustsum/atoms.hpp"

namespace robustsum {

enum class Verdict { Member, MemberUpTo, NotMember, Unknown };
std::string_view to_string(Verdict v);

inline bool is_member(Verdict v) { return v == Verdict::Member || v == Verdict::MemberUpTo; }

// alpha + Σ eps_i = eps + eta
struct EpsSplit {
  double alpha = 0;
  std::vector<double> eps_i;
  double eta = 0;
};

struct Witness {
  std::vector<std::size_t> J;
  std::vector<Vector> parts;
  std::optional<EpsSplit> split;
  std::vector<double> r_parts;  // epigraph witnesses: f_i*(parts_i) <= r_i, Σ r_i = r
};

struct Certificate {
  Verdict verdict = Verdict::Unknown;
  std::optional<Witness> witness;
  std::string reason;
  double eta_floor = 0;
};

}  // namespace robustsum
