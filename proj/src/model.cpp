#include "ctmc/model.hpp"

#include <cmath>
#include <sstream>

#include "ctmc/errors.hpp"

namespace ctmc {

std::string_view to_string(ChainClass c) {
  switch (c) {
    case ChainClass::BirthDeath: return "BirthDeath";
    case ChainClass::BatchArrival: return "BatchArrival";
    case ChainClass::BatchService: return "BatchService";
    case ChainClass::BatchBoth: return "BatchBoth";
  }
  return "?";
}

ChainClass chain_class_from_string(std::string_view s) {
  if (s == "BirthDeath") return ChainClass::BirthDeath;
  if (s == "BatchArrival") return ChainClass::BatchArrival;
  if (s == "BatchService") return ChainClass::BatchService;
  if (s == "BatchBoth") return ChainClass::BatchBoth;
  throw ModelError("unknown chain class '" + std::string(s) + "'");
}

namespace {

RateFunction lookup(const std::map<int, RateFunction>& m, int key) {
  auto it = m.find(key);
  return it == m.end() ? RateFunction{} : it->second;
}

bool finite_coefficients(const RateFunction& f) {
  if (!std::isfinite(f.constant())) return false;
  for (const auto& [k, h] : f.harmonics()) {
    if (!std::isfinite(h.sin_coeff) || !std::isfinite(h.cos_coeff)) return false;
  }
  return true;
}

// Grid minimum over one period; constants short-circuit.
double grid_minimum(const RateFunction& f) {
  if (f.is_constant()) return f.constant();
  if (f.lower_bound() >= 0.0) return f.lower_bound();
  double m = f(0.0);
  for (int i = 1; i < kNonnegGridPoints; ++i) {
    m = std::min(m, f(static_cast<double>(i) / (kNonnegGridPoints - 1)));
  }
  return m;
}

}  // namespace

RateFunction ChainModel::birth_rate(int state) const { return lookup(birth, state); }
RateFunction ChainModel::death_rate(int state) const { return lookup(death, state); }
RateFunction ChainModel::arrival_rate(int batch) const { return lookup(arrival_batch, batch); }
RateFunction ChainModel::service_rate(int batch) const { return lookup(service_batch, batch); }

bool ChainModel::uses_birth() const {
  return kind == ChainClass::BirthDeath || kind == ChainClass::BatchService;
}
bool ChainModel::uses_death() const {
  return kind == ChainClass::BirthDeath || kind == ChainClass::BatchArrival;
}
bool ChainModel::uses_arrival_batches() const {
  return kind == ChainClass::BatchArrival || kind == ChainClass::BatchBoth;
}
bool ChainModel::uses_service_batches() const {
  return kind == ChainClass::BatchService || kind == ChainClass::BatchBoth;
}

bool ChainModel::is_homogeneous() const {
  for (const auto* m : {&birth, &death, &arrival_batch, &service_batch}) {
    for (const auto& [k, f] : *m) {
      if (!f.is_constant()) return false;
    }
  }
  return true;
}

std::vector<Violation> validate(const ChainModel& model) {
  std::vector<Violation> out;
  auto report = [&](std::string code, const std::string& detail) {
    out.push_back({std::move(code), detail});
  };

  if (model.S < 1) {
    report("S must be positive", "S = " + std::to_string(model.S));
    return out;
  }

  struct Family {
    const char* name;
    const std::map<int, RateFunction>* rates;
    bool allowed;
    int lo, hi;
    bool batch;
  };
  const Family families[] = {
      {"birth", &model.birth, model.uses_birth(), 0, model.S - 1, false},
      {"death", &model.death, model.uses_death(), 1, model.S, false},
      {"arrival_batch", &model.arrival_batch, model.uses_arrival_batches(), 1, model.S, true},
      {"service_batch", &model.service_batch, model.uses_service_batches(), 1, model.S, true},
  };

  for (const auto& fam : families) {
    if (!fam.allowed && !fam.rates->empty()) {
      report("rate map not allowed for class",
             std::string(fam.name) + " is not used by class " + std::string(to_string(model.kind)));
    }
    for (const auto& [key, f] : *fam.rates) {
      const std::string where = std::string(fam.name) + "[" + std::to_string(key) + "]";
      if (key < fam.lo || key > fam.hi) {
        report(fam.batch ? "batch size exceeds S" : "state index out of range",
               where + " outside " + std::to_string(fam.lo) + ".." + std::to_string(fam.hi));
      }
      if (!finite_coefficients(f)) {
        report("non-finite coefficient", where);
        continue;
      }
      const double m = grid_minimum(f);
      if (m < -1e-12) {
        std::ostringstream os;
        os << where << " reaches " << m;
        report("negative intensity", os.str());
      }
    }
  }
  return out;
}

void require_valid(const ChainModel& model) {
  const auto v = validate(model);
  if (v.empty()) return;
  std::string msg = "invalid model:";
  for (const auto& x : v) msg += "\n  " + x.code + ": " + x.detail;
  throw ModelError(msg);
}

ChainModel retruncate(const ChainModel& model, int new_S) {
  if (new_S < 1) throw ModelError("truncation level must be positive");
  ChainModel out = model;
  out.S = new_S;
  out.truncated = true;

  auto extend = [](std::map<int, RateFunction>& m, int lo, int hi) {
    if (m.empty()) return;
    const RateFunction last = m.rbegin()->second;
    const int last_key = m.rbegin()->first;
    for (auto it = m.begin(); it != m.end();) {
      it = (it->first > hi) ? m.erase(it) : std::next(it);
    }
    for (int i = std::max(lo, last_key + 1); i <= hi; ++i) m[i] = last;
  };
  extend(out.birth, 0, new_S - 1);
  extend(out.death, 1, new_S);
  for (auto* m : {&out.arrival_batch, &out.service_batch}) {
    for (auto it = m->begin(); it != m->end();) {
      it = (it->first > new_S) ? m->erase(it) : std::next(it);
    }
  }
  return out;
}

}  // namespace ctmc
