#include "rcm/walker.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>

#include "rcm/errors.hpp"

namespace rcm {

namespace {

// 53 random bits -> [0, 1).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double exponential(std::mt19937_64& rng, double rate) { return -std::log1p(-unit(rng)) / rate; }

MartingalePath decompose(const WalkPath& path, int d, const std::function<double(const Vertex&, int)>& chi) {
  MartingalePath out;
  std::vector<double> at_origin(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) at_origin[static_cast<std::size_t>(j)] = chi(Vertex::origin(d), j);
  out.martingale.reserve(path.vertices.size());
  out.remainder.reserve(path.vertices.size());
  for (const Vertex& x : path.vertices) {
    std::vector<double> m(static_cast<std::size_t>(d));
    std::vector<double> r(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      const auto k = static_cast<std::size_t>(j);
      r[k] = chi(x, j) - at_origin[k];
      m[k] = static_cast<double>(x[j]) - r[k];
      out.sup_remainder = std::max(out.sup_remainder, std::abs(r[k]));
    }
    out.martingale.push_back(std::move(m));
    out.remainder.push_back(std::move(r));
  }
  return out;
}

}  // namespace

const Vertex& WalkPath::position_at(double t) const {
  if (!(t >= 0.0) || t > horizon) throw ValidationError("time outside [0, horizon]");
  // last k with times[k] <= t
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return vertices[static_cast<std::size_t>(it - times.begin()) - 1];
}

WalkPath simulate_walk(const Medium& omega, const Vertex& start, double horizon, std::uint64_t seed, WalkMode mode,
                       const WalkOptions& options) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("walk horizon must be positive");
  if (start.dim != omega.dim()) throw ValidationError("start vertex has the wrong dimension");
  const int d = omega.dim();
  std::mt19937_64 jumps(mix64(mix64(seed) ^ 1));
  std::mt19937_64 clock(mix64(mix64(seed) ^ 2));

  WalkPath path;
  path.horizon = horizon;
  path.times.push_back(0.0);
  path.vertices.push_back(start);

  std::array<double, 2 * kMaxDim> w{};
  Vertex x = start;
  double t = 0.0;
  std::uint64_t events = 0;
  for (;;) {
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
      w[static_cast<std::size_t>(2 * i)] = omega.conductance(x, i);
      w[static_cast<std::size_t>(2 * i + 1)] = omega.conductance(x.shifted(i, -1), i);
    }
    for (int k = 0; k < 2 * d; ++k) total += w[static_cast<std::size_t>(k)];
    const double rate = mode == WalkMode::kVariableSpeed ? total : 1.0;
    t += exponential(clock, rate);
    if (t > horizon) break;
    if (++events > options.max_events) {
      throw SimulationError("walk exceeded " + std::to_string(options.max_events) + " events before time " +
                                std::to_string(horizon),
                            events);
    }
    const double target = unit(jumps) * total;
    double acc = 0.0;
    int choice = 2 * d - 1;
    for (int k = 0; k < 2 * d; ++k) {
      acc += w[static_cast<std::size_t>(k)];
      if (target < acc) {
        choice = k;
        break;
      }
    }
    x = x.shifted(choice / 2, choice % 2 == 0 ? 1 : -1);
    path.times.push_back(t);
    path.vertices.push_back(x);
  }
  return path;
}

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x5851F42D4C957F2DULL));
}

RescaledPath::RescaledPath(const WalkPath& path, Coord n, double horizon) : path_(&path), n_(n), horizon_(horizon) {
  if (n < 1) throw ValidationError("rescaling factor must be at least 1");
  if (!(horizon >= 0.0)) throw ValidationError("rescaled horizon must be nonnegative");
  const double needed = static_cast<double>(n) * static_cast<double>(n) * horizon;
  if (path.horizon < needed) {
    throw ValidationError("path horizon " + std::to_string(path.horizon) + " is shorter than n^2 T = " +
                          std::to_string(needed));
  }
}

std::vector<double> RescaledPath::operator()(double t) const {
  if (!(t >= 0.0) || t > horizon_) throw ValidationError("time outside the rescaled horizon");
  const double nn = static_cast<double>(n_);
  const Vertex& x = path_->position_at(nn * nn * t);
  std::vector<double> out(static_cast<std::size_t>(x.dim));
  for (int i = 0; i < x.dim; ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(x[i]) / nn;
  return out;
}

MartingalePath martingale_part(const WalkPath& path, const std::vector<PeriodicField>& chi) {
  const int d = path.start().dim;
  if (static_cast<int>(chi.size()) != d) throw ValidationError("need one corrector per direction");
  return decompose(path, d, [&](const Vertex& x, int j) { return chi[static_cast<std::size_t>(j)](x); });
}

MartingalePath martingale_part(const WalkPath& path, const std::vector<ScalarField>& chi) {
  const int d = path.start().dim;
  if (static_cast<int>(chi.size()) != d) throw ValidationError("need one corrector per direction");
  return decompose(path, d, [&](const Vertex& x, int j) { return chi[static_cast<std::size_t>(j)](x); });
}

void write_path_csv(std::ostream& os, const WalkPath& path) {
  const int d = path.start().dim;
  os << "time";
  for (int i = 0; i < d; ++i) os << ",x_" << (i + 1);
  os << '\n';
  char buf[32];
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", path.times[k]);
    os << buf;
    for (int i = 0; i < d; ++i) os << ',' << path.vertices[k][i];
    os << '\n';
  }
}

}  // namespace rcm
