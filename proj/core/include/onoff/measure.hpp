#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "onoff/params.hpp"
#include "onoff/random.hpp"

namespace onoff {

class TestFunction;

/// A point mass of a finite atomic measure on R^d x {0,1}.
struct Atom {
  std::vector<double> position;
  State state = State::active;
  double weight = 0.0;
};

/// Finite atomic measure. Weights are strictly positive; the empty measure is
/// the zero measure.
class FiniteMeasure {
 public:
  explicit FiniteMeasure(int dim = 1);

  static FiniteMeasure dirac(std::vector<double> position, State state, double weight = 1.0);

  void add(std::vector<double> position, State state, double weight);

  int dim() const { return dim_; }
  std::span<const Atom> atoms() const { return atoms_; }
  double total_mass() const { return total_mass_; }
  bool empty() const { return atoms_.empty(); }
  double mass_in(State s) const;

  FiniteMeasure operator+(const FiniteMeasure& other) const;

 private:
  int dim_;
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

/// Flat particle list: positions are stored row-major with stride `dim`, each
/// particle carrying `particle_mass`.
struct Population {
  int dim = 1;
  double particle_mass = 1.0;
  std::vector<double> positions;
  std::vector<State> states;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  std::span<const double> position(std::size_t k) const {
    return {positions.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  void push_back(std::span<const double> x, State s);
  std::size_t count(State s) const;
};

/// Draws N ~ Poisson(total_mass / epsilon) particles i.i.d. from the normalised
/// measure, each of mass `epsilon`. The zero measure yields an empty
/// population. Throws NonPositiveEpsilon.
Population poissonize(const FiniteMeasure& mu, double epsilon, RandomSource& rng);

/// <population, phi> = sum_k mass * phi(x_k, i_k).
double pair_integral(const Population& population, const TestFunction& phi);
/// <mu, phi> = sum over atoms of weight * phi(x, i).
double pair_integral(const FiniteMeasure& mu, const TestFunction& phi);

}  // namespace onoff
