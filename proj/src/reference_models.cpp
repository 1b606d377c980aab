#include "ctmc/reference_models.hpp"

#include "ctmc/errors.hpp"

namespace ctmc {

ChainModel birth_death_chain(const std::vector<double>& birth, const std::vector<double>& death) {
  if (birth.empty() || birth.size() != death.size()) {
    throw ModelError("birth and death vectors must have equal nonzero length S");
  }
  ChainModel m;
  m.kind = ChainClass::BirthDeath;
  m.S = static_cast<int>(birth.size());
  for (int i = 0; i < m.S; ++i) {
    m.birth[i] = birth[i];
    m.death[i + 1] = death[i];
  }
  return m;
}

ChainModel bulk_arrival_example(int S, double m) {
  ChainModel model;
  model.kind = ChainClass::BatchArrival;
  model.S = S;
  model.arrival_batch[1] = RateFunction(1.0).add_harmonic(1, 1.0, 0.0);
  for (int k = 2; k <= S; ++k) model.arrival_batch[k] = RateFunction(2.0).add_harmonic(1, 1.0, 1.0);
  const double m2 = m * m;
  for (int k = 1; k <= S; ++k) model.death[k] = RateFunction(m2).add_harmonic(1, 0.0, m2);
  return model;
}

ChainModel bulk_service_example(int S, double m) {
  ChainModel model;
  model.kind = ChainClass::BatchService;
  model.S = S;
  for (int i = 0; i < S; ++i) model.birth[i] = RateFunction(20.0).add_harmonic(1, 10.0, 0.0);
  const double w = 1.0 / (m * m);
  model.service_batch[S] = RateFunction(2.0 * w).add_harmonic(1, 0.0, w);
  return model;
}

ChainModel pure_batch_arrival_chain(double lambda, const std::vector<double>& mu) {
  ChainModel model;
  model.kind = ChainClass::BatchArrival;
  model.S = static_cast<int>(mu.size());
  for (int k = 2; k <= model.S; ++k) model.arrival_batch[k] = lambda;
  for (int k = 1; k <= model.S; ++k) model.death[k] = mu[k - 1];
  return model;
}

ChainModel pure_batch_service_chain(int S, double lambda, double b) {
  ChainModel model;
  model.kind = ChainClass::BatchService;
  model.S = S;
  for (int i = 0; i < S; ++i) model.birth[i] = lambda;
  model.service_batch[S] = b;
  return model;
}

}  // namespace ctmc
