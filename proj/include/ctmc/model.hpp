#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ctmc/rate_function.hpp"

namespace ctmc {

/// Structural class of the chain on {0, ..., S}.
///  BirthDeath:   i -> i+1 at birth[i], i -> i-1 at death[i]
///  BatchArrival: i -> i+k at arrival_batch[k], i -> i-1 at death[i]
///  BatchService: i -> i+1 at birth[i], i -> i-k at service_batch[k]
///  BatchBoth:    i -> i+k at arrival_batch[k], i -> i-k at service_batch[k]
/// Jumps that would leave {0, ..., S} are blocked.
enum class ChainClass { BirthDeath, BatchArrival, BatchService, BatchBoth };

std::string_view to_string(ChainClass c);
ChainClass chain_class_from_string(std::string_view s);

struct ChainModel {
  ChainClass kind = ChainClass::BirthDeath;
  int S = 1;
  bool truncated = false;  // S is a truncation level of a countable chain

  std::map<int, RateFunction> birth;          // state 0..S-1
  std::map<int, RateFunction> death;          // state 1..S
  std::map<int, RateFunction> arrival_batch;  // batch size 1..S
  std::map<int, RateFunction> service_batch;  // batch size 1..S

  // Missing keys read as the zero rate.
  RateFunction birth_rate(int state) const;
  RateFunction death_rate(int state) const;
  RateFunction arrival_rate(int batch) const;
  RateFunction service_rate(int batch) const;

  bool uses_birth() const;
  bool uses_death() const;
  bool uses_arrival_batches() const;
  bool uses_service_batches() const;

  /// True when no rate has harmonics.
  bool is_homogeneous() const;

  bool operator==(const ChainModel&) const = default;
};

struct Violation {
  std::string code;
  std::string detail;
};

/// Returns every violated model invariant; empty means valid.
std::vector<Violation> validate(const ChainModel& model);

/// Throws ModelError listing the violations, if any.
void require_valid(const ChainModel& model);

/// Number of points of the nonnegativity grid over one period.
inline constexpr int kNonnegGridPoints = 10001;

/// Same chain at a different truncation level. State-indexed maps are
/// extended with their highest-indexed rate and cut above the new boundary;
/// batch maps drop sizes above the new S.
ChainModel retruncate(const ChainModel& model, int new_S);

}  // namespace ctmc
