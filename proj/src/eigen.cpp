#include "spine/eigen.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>

#include "spine/errors.hpp"

namespace spine {

StateSpace::StateSpace(std::size_t numTypes, std::int64_t capacity,
                       std::vector<SpineState> states)
    : numTypes_(numTypes),
      capacity_(capacity),
      states_(std::move(states)),
      index_(numTypes) {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    index_[states_[i].type.index].emplace(states_[i].z, i);
  }
}

std::optional<std::size_t> StateSpace::index_of(TypeId x,
                                                const PopVector& z) const {
  if (x.index >= numTypes_) return std::nullopt;
  const auto& m = index_[x.index];
  const auto it = m.find(z);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

double state_count(std::size_t numTypes, std::int64_t capacity) {
  // d * C(capacity - 1 + d, d)
  double c = 1.0;
  const auto d = static_cast<double>(numTypes);
  for (std::size_t i = 1; i <= numTypes; ++i) {
    c *= static_cast<double>(capacity - 1) + static_cast<double>(i);
    c /= static_cast<double>(i);
  }
  return d * c;
}

StateSpace enumerate_states(std::size_t numTypes, std::int64_t capacity,
                            std::size_t limit) {
  if (numTypes == 0) raise(ErrorCode::ModelShape, "no types");
  if (capacity < 1) raise(ErrorCode::ModelShape, "capacity must be >= 1");
  const double n = state_count(numTypes, capacity);
  if (n > static_cast<double>(limit)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", n);
    raise(ErrorCode::Capacity,
          std::string("state space has ") + buf +
              " states, above the limit of " + std::to_string(limit) +
              "; lower the capacity or raise the state limit");
  }
  std::vector<std::vector<std::int64_t>> all;
  std::vector<std::int64_t> cur(numTypes, 0);
  std::function<void(std::size_t, std::int64_t)> rec =
      [&](std::size_t i, std::int64_t left) {
        if (i == numTypes) {
          all.push_back(cur);
          return;
        }
        for (std::int64_t c = 0; c <= left; ++c) {
          cur[i] = c;
          rec(i + 1, left - c);
        }
        cur[i] = 0;
      };
  rec(0, capacity);
  std::vector<SpineState> states;
  states.reserve(static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < numTypes; ++r) {
    for (const auto& v : all) {
      if (v[r] >= 1) {
        states.push_back({TypeId{static_cast<std::uint32_t>(r)}, PopVector(v)});
      }
    }
  }
  return StateSpace(numTypes, capacity, std::move(states));
}

SparseMatrix build_generator_matrix(const RateKernel& kernel,
                                    const StateSpace& states) {
  const std::size_t n = states.size();
  const std::size_t d = kernel.num_types();
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t a = 0; a < n; ++a) {
    const TypeId x = states[a].type;
    const PopVector& z = states[a].z;
    double outflow = 0.0;
    for (std::size_t yi = 0; yi < d; ++yi) {
      const TypeId y{static_cast<std::uint32_t>(yi)};
      if (z[y] == 0) continue;
      const std::int64_t others = z[y] - (y == x ? 1 : 0);
      const auto& sup = kernel.support(y);
      for (std::size_t j = 0; j < sup.size(); ++j) {
        const double r = kernel.rate(y, z, j);
        if (r == 0.0) continue;
        outflow += r * static_cast<double>(z[y]);
        const auto& k = sup[j].offspring;
        const PopVector next = z.after_branch(y, k);
        auto col = [&](TypeId w) {
          const auto b = states.index_of(w, next);
          if (!b) {
            raise(ErrorCode::Capacity, "transition leaves the state space");
          }
          return static_cast<int>(*b);
        };
        if (y == x) {
          for (std::size_t wi = 0; wi < d; ++wi) {
            if (k[wi] == 0) continue;
            const TypeId w{static_cast<std::uint32_t>(wi)};
            trips.emplace_back(static_cast<int>(a), col(w),
                               r * static_cast<double>(k[wi]));
          }
        }
        if (others > 0) {
          trips.emplace_back(static_cast<int>(a), col(x),
                             r * static_cast<double>(others));
        }
      }
    }
    trips.emplace_back(static_cast<int>(a), static_cast<int>(a), -outflow);
  }
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

namespace {

std::vector<char> reachable(const std::vector<std::vector<std::size_t>>& adj,
                            std::size_t start) {
  std::vector<char> seen(adj.size(), 0);
  std::deque<std::size_t> q{start};
  seen[start] = 1;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        q.push_back(v);
      }
    }
  }
  return seen;
}

double max_abs(const SparseMatrix& m) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
      s = std::max(s, std::fabs(it.value()));
    }
  }
  return s;
}

struct Bounds {
  double lo;
  double hi;
};

// Collatz-Wielandt bounds min/max (M x)_i / x_i for positive x.
Bounds cw_bounds(const Eigen::SparseMatrix<double>& m,
                 const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = m * x;
  Bounds b{std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = y[i] / x[i];
    b.lo = std::min(b.lo, r);
    b.hi = std::max(b.hi, r);
  }
  return b;
}

struct Vec {
  Eigen::VectorXd v;
  double lambda;
  std::size_t iterations;
};

// Positive Perron vector of a column-major Metzler matrix.
Vec perron_vector(const Eigen::SparseMatrix<double>& m, double tol,
                  std::size_t maxIterations, double scale) {
  const Eigen::Index n = m.rows();
  double diag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    diag = std::max(diag, std::fabs(m.coeff(i, i)));
  }
  const double shift = diag + 1e-2 * scale;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  std::size_t it = 0;
  double rho = 0.0;
  const std::size_t powerCap = std::min<std::size_t>(maxIterations, 20000);
  for (; it < powerCap; ++it) {
    Eigen::VectorXd y = m * x + shift * x;
    const double next = y.sum() / x.sum();
    x = y / y.sum();
    if (it > 10 && std::fabs(next - rho) < tol * scale) {
      rho = next;
      break;
    }
    rho = next;
  }

  // Inverse iteration with (mu I - M)^{-1}, a positive matrix when mu exceeds
  // the Perron root, so positivity is preserved while converging fast.
  Eigen::SparseMatrix<double> id(n, n);
  id.setIdentity();
  Bounds b = cw_bounds(m, x);
  double best = b.hi - b.lo;
  int stale = 0;
  while (it < maxIterations && best > tol * scale && stale < 3) {
    const double mu = b.hi + std::max(1e-7 * scale, 1e-3 * (b.hi - b.lo));
    Eigen::SparseMatrix<double> a = mu * id - m;
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
      raise(ErrorCode::NoConvergence, "factorization failed");
    }
    for (int inner = 0; inner < 20 && it < maxIterations; ++inner, ++it) {
      Eigen::VectorXd y = lu.solve(x);
      x = y / y.sum();
    }
    b = cw_bounds(m, x);
    const double spread = b.hi - b.lo;
    if (spread < 0.5 * best) {
      stale = 0;
    } else {
      ++stale;
    }
    best = std::min(best, spread);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(x[i] > 0.0)) {
      raise(ErrorCode::NoConvergence, "Perron vector lost positivity");
    }
  }
  if (b.hi - b.lo > 1e3 * tol * scale) {
    raise(ErrorCode::NoConvergence,
          "Perron root not resolved: bounds differ by " +
              std::to_string(b.hi - b.lo));
  }
  return {x, 0.5 * (b.lo + b.hi), it};
}

}  // namespace

Reachability irreducibility_check(const SparseMatrix& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  Reachability out;
  if (n == 0) return out;
  if (n == 1) {
    out.irreducible = true;
    return out;
  }
  std::vector<std::vector<std::size_t>> fwd(n), bwd(n);
  for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      const auto c = static_cast<std::size_t>(it.col());
      if (r != c && it.value() != 0.0) {
        fwd[r].push_back(c);
        bwd[c].push_back(r);
      }
    }
  }
  const auto f = reachable(fwd, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!f[i]) {
      out.from = 0;
      out.to = i;
      return out;
    }
  }
  const auto g = reachable(bwd, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!g[i]) {
      out.from = i;
      out.to = 0;
      return out;
    }
  }
  out.irreducible = true;
  return out;
}

EigenTriplet perron_frobenius(const SparseMatrix& m, double tol,
                              std::size_t maxIterations) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    raise(ErrorCode::ModelShape, "matrix must be square and nonempty");
  }
  if (!(tol > 0.0)) raise(ErrorCode::Config, "tolerance must be positive");
  const auto reach = irreducibility_check(m);
  if (!reach.irreducible) {
    raise(ErrorCode::NotIrreducible,
          "state " + std::to_string(reach.to) + " is not reachable from state " +
              std::to_string(reach.from));
  }
  EigenTriplet out;
  const Eigen::Index n = m.rows();
  if (n == 1) {
    out.lambda = m.coeff(0, 0);
    out.h = Eigen::VectorXd::Ones(1);
    out.gamma = Eigen::VectorXd::Ones(1);
    return out;
  }
  for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
      if (it.row() != it.col() && it.value() < 0.0) {
        raise(ErrorCode::ModelShape, "negative off-diagonal entry");
      }
    }
  }
  const double scale = std::max(1.0, max_abs(m));
  const Eigen::SparseMatrix<double> colMajor = m;
  const Eigen::SparseMatrix<double> transposed = colMajor.transpose();
  const Vec right = perron_vector(colMajor, tol, maxIterations, scale);
  const Vec left = perron_vector(transposed, tol, maxIterations, scale);
  out.lambda = right.lambda;
  out.gamma = left.v / left.v.sum();
  out.h = right.v / right.v.dot(out.gamma);
  out.residualRight = (colMajor * out.h - out.lambda * out.h).cwiseAbs().maxCoeff();
  out.residualLeft =
      (transposed * out.gamma - out.lambda * out.gamma).cwiseAbs().maxCoeff();
  out.iterations = right.iterations + left.iterations;
  return out;
}

Eigen::VectorXd stationary_law(const EigenTriplet& trip) {
  return trip.h.cwiseProduct(trip.gamma);
}

double ancestral_branch_intensity(const RateKernel& kernel,
                                  const StateSpace& states,
                                  const EigenTriplet& trip, std::size_t a,
                                  std::size_t j) {
  const TypeId x = states[a].type;
  const PopVector& z = states[a].z;
  const auto& k = kernel.support(x).at(j).offspring;
  if (z.norm1() + k.norm1() - 1 > states.capacity()) {
    raise(ErrorCode::Capacity, "offspring would exceed the capacity");
  }
  const double r = kernel.rate(x, z, j);
  if (r == 0.0) return 0.0;
  const PopVector next = z.after_branch(x, k);
  double s = 0.0;
  for (std::size_t w = 0; w < k.size(); ++w) {
    if (k[w] == 0) continue;
    const auto b = states.index_of(TypeId{static_cast<std::uint32_t>(w)}, next);
    s += static_cast<double>(k[w]) * trip.h[static_cast<Eigen::Index>(*b)];
  }
  return trip.gamma[static_cast<Eigen::Index>(a)] * r * s;
}

PsiFunction tabulated_psi(std::string name,
                          std::shared_ptr<const StateSpace> states,
                          std::vector<double> values) {
  if (values.size() != states->size()) {
    raise(ErrorCode::ModelShape, "tabulated psi has wrong length");
  }
  auto vals = std::make_shared<const std::vector<double>>(std::move(values));
  return PsiFunction(std::move(name), [states, vals](TypeId x,
                                                     const PopVector& z) {
    const auto i = states->index_of(x, z);
    if (!i) {
      raise(ErrorCode::Domain, "state (" + std::to_string(x.index) + "; " +
                                   z.to_string() +
                                   ") outside the tabulated psi");
    }
    return (*vals)[*i];
  });
}

PsiFunction eigen_psi(std::shared_ptr<const StateSpace> states,
                      const Eigen::VectorXd& h) {
  return tabulated_psi("eigen-h", std::move(states),
                       std::vector<double>(h.data(), h.data() + h.size()));
}

}  // namespace spine
