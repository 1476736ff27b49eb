#include "onoff/measure.hpp"

#include <cmath>
#include <random>
#include <string>

#include "onoff/error.hpp"
#include "onoff/test_function.hpp"

namespace onoff {

FiniteMeasure::FiniteMeasure(int dim) : dim_(dim) {
  if (dim < 1) throw BadDimension("measure dimension must be >= 1");
}

FiniteMeasure FiniteMeasure::dirac(std::vector<double> position, State state, double weight) {
  FiniteMeasure mu(static_cast<int>(position.size()));
  mu.add(std::move(position), state, weight);
  return mu;
}

void FiniteMeasure::add(std::vector<double> position, State state, double weight) {
  if (static_cast<int>(position.size()) != dim_) {
    throw BadDimension("atom has " + std::to_string(position.size()) +
                       " coordinates, measure dimension is " + std::to_string(dim_));
  }
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw InvalidArgument("atom weights must be finite and strictly positive");
  }
  atoms_.push_back(Atom{std::move(position), state, weight});
  total_mass_ += weight;
}

double FiniteMeasure::mass_in(State s) const {
  double m = 0.0;
  for (const auto& a : atoms_) {
    if (a.state == s) m += a.weight;
  }
  return m;
}

FiniteMeasure FiniteMeasure::operator+(const FiniteMeasure& other) const {
  if (other.dim_ != dim_) throw BadDimension("cannot add measures of different dimension");
  FiniteMeasure sum = *this;
  for (const auto& a : other.atoms_) sum.add(a.position, a.state, a.weight);
  return sum;
}

void Population::push_back(std::span<const double> x, State s) {
  positions.insert(positions.end(), x.begin(), x.end());
  states.push_back(s);
}

std::size_t Population::count(State s) const {
  std::size_t n = 0;
  for (State st : states) n += (st == s);
  return n;
}

Population poissonize(const FiniteMeasure& mu, double epsilon, RandomSource& rng) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw NonPositiveEpsilon("epsilon must be finite and > 0");
  }
  Population pop;
  pop.dim = mu.dim();
  pop.particle_mass = epsilon;
  if (mu.empty()) return pop;

  const auto n = rng.poisson(mu.total_mass() / epsilon);
  const auto atoms = mu.atoms();
  pop.positions.reserve(n * static_cast<std::size_t>(mu.dim()));
  pop.states.reserve(n);
  if (atoms.size() == 1) {
    for (std::uint64_t k = 0; k < n; ++k) pop.push_back(atoms[0].position, atoms[0].state);
    return pop;
  }
  std::vector<double> weights;
  weights.reserve(atoms.size());
  for (const auto& a : atoms) weights.push_back(a.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto& a = atoms[pick(rng)];
    pop.push_back(a.position, a.state);
  }
  return pop;
}

double pair_integral(const Population& population, const TestFunction& phi) {
  double sum = 0.0;
  for (std::size_t k = 0; k < population.size(); ++k) {
    sum += phi(population.position(k), population.states[k]);
  }
  return population.particle_mass * sum;
}

double pair_integral(const FiniteMeasure& mu, const TestFunction& phi) {
  double sum = 0.0;
  for (const auto& a : mu.atoms()) sum += a.weight * phi(a.position, a.state);
  return sum;
}

}  // namespace onoff
