#pragma once

#include <vector>

#include "ctmc/model.hpp"

namespace ctmc {

/// Homogeneous birth-death chain; birth[i] for i = 0..S-1, death[i-1] for i = 1..S.
ChainModel birth_death_chain(const std::vector<double>& birth, const std::vector<double>& death);

/// Bulk-arrival queue with periodic rates:
///   a_1(t) = 1 + sin 2pi t,  a_k(t) = 2 + sin 2pi t + cos 2pi t (k >= 2),
///   mu_k(t) = m^2 (1 + cos 2pi t).
ChainModel bulk_arrival_example(int S = 199, double m = 90.0);

/// Bulk-service queue with periodic rates:
///   lambda(t) = 10 (2 + sin 2pi t) in every state,  b_S(t) = m^-2 (2 + cos 2pi t).
ChainModel bulk_service_example(int S = 40, double m = 1.0);

/// Homogeneous batch-arrival chain with a_1 = 0, a_k = lambda (k >= 2) and deaths mu.
ChainModel pure_batch_arrival_chain(double lambda, const std::vector<double>& mu);

/// Homogeneous chain with arrivals lambda in every state and only full-batch service b_S = b.
ChainModel pure_batch_service_chain(int S, double lambda, double b);

}  // namespace ctmc
