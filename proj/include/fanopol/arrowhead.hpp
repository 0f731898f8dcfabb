#pragma once

// Symmetric arrowhead matrices
//
//     [ apex  c_0  c_1  ...  c_{n-1} ]
//     [ c_0   d_0                    ]
//     [ c_1        d_1               ]
//     [ ...             ...          ]
//     [ c_{n-1}               d_{n-1}]
//
// and their full eigendecomposition by the secular equation
//
//     f(w) = w - apex - sum_j c_j^2 / (w - d_j) = 0.
//
// Each root is bracketed by consecutive poles and refined in coordinates
// shifted to the nearer pole, so that w - d_j is formed without cancellation
// and the eigenvector weights stay accurate for roots hugging a pole.
// A dense solver on the expanded matrix serves as a cross-check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fanopol/error.hpp"
#include "fanopol/polariton.hpp"

namespace fanopol {

/// Identifies which polariton ring and branch a continuum position stands for.
struct RingSlot {
    Branch branch = Branch::lower;
    std::size_t ring = 0;

    friend bool operator==(const RingSlot&, const RingSlot&) = default;
};

template <std::floating_point Real = double>
struct BasicArrowheadMatrix {
    Real apex = 1;
    std::vector<Real> diag;
    std::vector<Real> coupling;
    // Empty for generic matrices; aligned with diag when built from a
    // polariton table.
    std::vector<RingSlot> ring_index;
    std::uint64_t source_fingerprint = 0;

    std::size_t continuum_size() const noexcept { return diag.size(); }
    std::size_t dimension() const noexcept { return diag.size() + 1; }

    void validate() const {
        if (diag.size() != coupling.size())
            throw ParameterError("arrowhead-solver", "diag and coupling lengths differ");
        if (!ring_index.empty() && ring_index.size() != diag.size())
            throw ParameterError("arrowhead-solver", "ring_index not aligned with diag");
        if (!std::isfinite(apex)) throw ParameterError("arrowhead-solver", "non-finite apex");
        for (std::size_t j = 0; j < diag.size(); ++j)
            if (!std::isfinite(diag[j]) || !std::isfinite(coupling[j]))
                throw ParameterError("arrowhead-solver", "non-finite entry at continuum position " +
                                                             std::to_string(j));
    }

    /// Row-sum (infinity) norm of the expanded matrix.
    Real norm_inf() const {
        Real top = std::abs(apex);
        Real best = 0;
        for (std::size_t j = 0; j < diag.size(); ++j) {
            top += std::abs(coupling[j]);
            best = std::max(best, std::abs(coupling[j]) + std::abs(diag[j]));
        }
        return std::max(top, best);
    }

    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> to_dense() const {
        const auto n = static_cast<Eigen::Index>(dimension());
        Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> m =
            Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
        m(0, 0) = apex;
        for (Eigen::Index j = 1; j < n; ++j) {
            const auto u = static_cast<std::size_t>(j - 1);
            m(j, j) = diag[u];
            m(0, j) = coupling[u];
            m(j, 0) = coupling[u];
        }
        return m;
    }
};

/// Eigenvalues (ascending) with apex weights mu and continuum weights lam.
/// Row z of lam holds the continuum components of eigenvector z, aligned
/// with the matrix's diag positions.
template <std::floating_point Real = double>
struct BasicEigenSystem {
    std::vector<Real> omega;
    std::vector<Real> mu;
    std::vector<Real> lam;  // row-major, size() x continuum_size()
    std::size_t n_continuum = 0;
    std::uint64_t source_fingerprint = 0;

    std::size_t size() const noexcept { return omega.size(); }
    std::size_t continuum_size() const noexcept { return n_continuum; }

    std::span<const Real> lam_row(std::size_t z) const {
        return {lam.data() + z * n_continuum, n_continuum};
    }
    Real lambda(std::size_t z, std::size_t j) const { return lam[z * n_continuum + j]; }
};

using ArrowheadMatrix = BasicArrowheadMatrix<double>;
using EigenSystem = BasicEigenSystem<double>;

struct SecularOptions {
    double rel_tol = 1e-13;          // relative step tolerance on the shifted root
    double coincidence_tol = 1e-14;  // relative gap under which poles are merged
    double deflation_factor = 8.0;   // |c_j| <= factor * eps * ||A|| is deflated
    int max_iterations = 400;
    unsigned threads = 1;
};

namespace detail {

template <class Real>
struct SecularRoot {
    Real origin = 0;  // pole the root is measured from
    Real tau = 0;     // root = origin + tau
};

// Reduced secular problem: strictly increasing poles with nonzero weights.
template <class Real>
struct ReducedProblem {
    Real apex = 0;
    std::vector<Real> poles;
    std::vector<Real> weights;  // z_k > 0
    Real weight_norm = 0;
};

template <class Real>
struct SecularEval {
    Real f = 0;
    Real df = 0;
    Real scale = 0;  // sum of term magnitudes, for the backward-error test
};

template <class Real>
SecularEval<Real> evaluate_shifted(const ReducedProblem<Real>& rp, Real origin, Real tau) {
    SecularEval<Real> e;
    const Real base = origin - rp.apex;
    Real sum = 0;
    Real dsum = 0;
    Real abs_sum = 0;
    for (std::size_t j = 0; j < rp.poles.size(); ++j) {
        const Real gap = tau - (rp.poles[j] - origin);
        const Real r = rp.weights[j] / gap;
        const Real t = r * rp.weights[j];
        sum += t;
        abs_sum += std::abs(t);
        dsum += r * r;
    }
    e.f = base + tau - sum;
    e.df = Real(1) + dsum;
    e.scale = std::abs(base) + std::abs(tau) + abs_sum;
    return e;
}

template <class Real>
[[noreturn]] void bracket_failure(std::size_t index, Real origin, Real lo, Real hi, Real f_value,
                                  int iterations) {
    std::ostringstream os;
    os.precision(17);
    os << "secular root " << index << " did not converge after " << iterations
       << " iterations; origin=" << origin << " bracket=[" << lo << ", " << hi
       << "] residual=" << f_value;
    throw SolverError("arrowhead-solver", os.str());
}

// Root `index` of the reduced problem, 0 <= index <= poles.size().
template <class Real>
SecularRoot<Real> solve_root(const ReducedProblem<Real>& rp, std::size_t index,
                             const SecularOptions& opt) {
    const std::size_t k = rp.poles.size();
    const Real eps = std::numeric_limits<Real>::epsilon();
    Real origin;
    Real lo;
    Real hi;
    if (index == 0) {
        origin = rp.poles.front();
        lo = std::min(rp.apex, origin) - rp.weight_norm - origin;
        hi = 0;
    } else if (index == k) {
        origin = rp.poles.back();
        lo = 0;
        hi = std::max(rp.apex, origin) + rp.weight_norm - origin;
    } else {
        const Real left = rp.poles[index - 1];
        const Real right = rp.poles[index];
        const Real half = (right - left) / 2;
        const auto mid = evaluate_shifted(rp, left, half);
        if (mid.f >= 0) {
            origin = left;
            lo = 0;
            hi = half;
        } else {
            origin = right;
            lo = (left - right) / 2;
            hi = 0;
        }
    }
    // Endpoints touching the origin pole are open; the others are closed
    // with a known sign (f(lo) <= 0 <= f(hi)).
    Real tau = (lo + hi) / 2;
    for (int it = 0; it < opt.max_iterations; ++it) {
        const auto e = evaluate_shifted(rp, origin, tau);
        if (e.f == 0 || std::abs(e.f) <= 4 * eps * e.scale) return {origin, tau};
        if (e.f < 0)
            lo = tau;
        else
            hi = tau;
        Real next = tau - e.f / e.df;
        const bool inside = next > lo && next < hi;
        if (!inside) next = lo + (hi - lo) / 2;
        if (inside && std::abs(next - tau) <= Real(opt.rel_tol) * std::abs(next)) return {origin, next};
        if (next == tau || next <= lo || next >= hi) {
            // bracket exhausted at working precision
            return {origin, tau};
        }
        tau = next;
    }
    const auto e = evaluate_shifted(rp, origin, tau);
    bracket_failure(index, origin, origin + lo, origin + hi, e.f, opt.max_iterations);
}

template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    const std::size_t begin = count * t / threads;
                    const std::size_t end = count * (t + 1) / threads;
                    for (std::size_t i = begin; i < end; ++i) body(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Full eigendecomposition of an arrowhead matrix in O(n^2).
template <std::floating_point Real>
BasicEigenSystem<Real> eigendecompose_arrowhead(const BasicArrowheadMatrix<Real>& a,
                                                const SecularOptions& opt = {}) {
    a.validate();
    const std::size_t n = a.continuum_size();
    BasicEigenSystem<Real> out;
    out.n_continuum = n;
    out.source_fingerprint = a.source_fingerprint;

    struct Pair {
        Real omega;
        Real mu;
        std::vector<std::pair<std::size_t, Real>> components;  // sparse continuum part
        std::size_t dense_slot = static_cast<std::size_t>(-1);  // secular root index
    };

    const Real eps = std::numeric_limits<Real>::epsilon();
    Real coupling_norm = 0;
    Real diag_max = std::abs(a.apex);
    for (std::size_t j = 0; j < n; ++j) {
        coupling_norm = std::hypot(coupling_norm, a.coupling[j]);
        diag_max = std::max(diag_max, std::abs(a.diag[j]));
    }
    const Real deflation_tol = Real(opt.deflation_factor) * eps * (diag_max + coupling_norm);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a.diag[x] < a.diag[y]; });

    std::vector<Pair> deflated;
    detail::ReducedProblem<Real> rp;
    rp.apex = a.apex;
    std::vector<std::vector<std::size_t>> group_members;

    // Current coincidence group: members, running norm of their couplings.
    for (std::size_t j : order) {
        const Real c = a.coupling[j];
        if (std::abs(c) <= deflation_tol) {
            deflated.push_back({a.diag[j], Real(0), {{j, Real(1)}}});
            continue;
        }
        if (!rp.poles.empty()) {
            const Real pole = rp.poles.back();
            const Real d = a.diag[j];
            if (std::abs(d - pole) <=
                Real(opt.coincidence_tol) * std::max(std::abs(d), std::abs(pole))) {
                // Rotate c_j into the group representative; the orthogonal
                // combination decouples with eigenvalue equal to the pole.
                auto& members = group_members.back();
                const Real r_prev = rp.weights.back();
                const Real r_new = std::hypot(r_prev, c);
                Pair p{pole, Real(0), {}};
                p.components.reserve(members.size() + 1);
                for (std::size_t m : members)
                    p.components.emplace_back(m, c * a.coupling[m] / (r_prev * r_new));
                p.components.emplace_back(j, -r_prev / r_new);
                deflated.push_back(std::move(p));
                members.push_back(j);
                rp.weights.back() = r_new;
                continue;
            }
        }
        rp.poles.push_back(a.diag[j]);
        rp.weights.push_back(std::abs(c));
        group_members.push_back({j});
    }
    for (Real z : rp.weights) rp.weight_norm = std::hypot(rp.weight_norm, z);

    const std::size_t k = rp.poles.size();
    const std::size_t n_roots = k + 1;
    std::vector<detail::SecularRoot<Real>> roots(n_roots);
    if (k == 0) {
        roots[0] = {a.apex, Real(0)};
    } else {
        detail::parallel_for(n_roots, opt.threads,
                                   [&](std::size_t r) { roots[r] = detail::solve_root(rp, r, opt); });
    }

    // Merge secular and deflated eigenvalues in ascending order.
    std::vector<std::pair<Real, std::size_t>> index;  // (omega, slot); slot < n_roots => secular
    index.reserve(n_roots + deflated.size());
    for (std::size_t r = 0; r < n_roots; ++r) index.emplace_back(roots[r].origin + roots[r].tau, r);
    for (std::size_t d = 0; d < deflated.size(); ++d) index.emplace_back(deflated[d].omega, n_roots + d);
    std::stable_sort(index.begin(), index.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });

    const std::size_t dim = n + 1;
    out.omega.resize(dim);
    out.mu.resize(dim);
    out.lam.assign(dim * n, Real(0));

    detail::parallel_for(dim, opt.threads, [&](std::size_t z) {
        const auto [omega, slot] = index[z];
        out.omega[z] = omega;
        Real* row = out.lam.data() + z * n;
        if (slot >= n_roots) {
            const Pair& p = deflated[slot - n_roots];
            out.mu[z] = p.mu;
            for (const auto& [pos, value] : p.components) row[pos] = value;
            return;
        }
        const auto& root = roots[slot];
        if (k == 0) {
            out.mu[z] = 1;
            return;
        }
        // w - p_i = tau - (p_i - origin), free of cancellation near the origin pole
        Real s = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const Real ratio = rp.weights[i] / (root.tau - (rp.poles[i] - root.origin));
            s += ratio * ratio;
        }
        const Real mu = Real(1) / std::sqrt(Real(1) + s);
        out.mu[z] = mu;
        for (std::size_t i = 0; i < k; ++i) {
            const Real component = mu * rp.weights[i] / (root.tau - (rp.poles[i] - root.origin));
            const auto& members = group_members[i];
            if (members.size() == 1) {
                // weights are |c|; restore the sign of the coupling
                const std::size_t pos = members.front();
                row[pos] = a.coupling[pos] < 0 ? -component : component;
            } else {
                for (std::size_t m : members) row[m] = component * a.coupling[m] / rp.weights[i];
            }
        }
    });
    return out;
}

/// Dense-solver route on the expanded matrix, refusing dimensions above `cap`.
template <std::floating_point Real>
BasicEigenSystem<Real> eigendecompose_dense(const BasicArrowheadMatrix<Real>& a, std::size_t cap = 2000) {
    a.validate();
    if (a.dimension() > cap)
        throw DimensionRefusedError("arrowhead-solver", "dense path refuses dimension " +
                                                            std::to_string(a.dimension()) + " > cap " +
                                                            std::to_string(cap));
    using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::SelfAdjointEigenSolver<Mat> solver(a.to_dense());
    if (solver.info() != Eigen::Success)
        throw SolverError("arrowhead-solver", "dense symmetric eigensolver did not converge");
    const std::size_t dim = a.dimension();
    const std::size_t n = a.continuum_size();
    BasicEigenSystem<Real> out;
    out.n_continuum = n;
    out.source_fingerprint = a.source_fingerprint;
    out.omega.resize(dim);
    out.mu.resize(dim);
    out.lam.resize(dim * n);
    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();
    for (std::size_t z = 0; z < dim; ++z) {
        const auto col = static_cast<Eigen::Index>(z);
        // Sign convention: mu >= 0, matching the secular route.
        Real sign = vectors(0, col) < 0 ? Real(-1) : Real(1);
        out.omega[z] = values(col);
        out.mu[z] = sign * vectors(0, col);
        for (std::size_t j = 0; j < n; ++j)
            out.lam[z * n + j] = sign * vectors(static_cast<Eigen::Index>(j + 1), col);
    }
    return out;
}

/// Identity checks on an eigensystem. Each returns a defect; smaller is better.
namespace checks {

/// |sum_z mu_z^2 - 1|
template <class Real>
Real apex_completeness(const BasicEigenSystem<Real>& e) {
    Real s = 0;
    for (Real m : e.mu) s += m * m;
    return std::abs(s - Real(1));
}

/// max_z |mu_z^2 + |lam_z|^2 - 1|
template <class Real>
Real normalization(const BasicEigenSystem<Real>& e) {
    Real worst = 0;
    for (std::size_t z = 0; z < e.size(); ++z) {
        Real s = e.mu[z] * e.mu[z];
        for (Real l : e.lam_row(z)) s += l * l;
        worst = std::max(worst, std::abs(s - Real(1)));
    }
    return worst;
}

/// |sum omega - trace| relative to sum of |diagonal entries|.
template <class Real>
Real trace(const BasicArrowheadMatrix<Real>& a, const BasicEigenSystem<Real>& e) {
    Real tr = a.apex;
    Real scale = std::abs(a.apex);
    for (Real d : a.diag) {
        tr += d;
        scale += std::abs(d);
    }
    Real s = 0;
    for (Real w : e.omega) s += w;
    return std::abs(s - tr) / std::max(scale, std::numeric_limits<Real>::min());
}

/// |sum mu^2 (omega - apex)^2 - sum c^2| relative to sum c^2.
template <class Real>
Real second_moment(const BasicArrowheadMatrix<Real>& a, const BasicEigenSystem<Real>& e) {
    Real target = 0;
    for (Real c : a.coupling) target += c * c;
    Real s = 0;
    for (std::size_t z = 0; z < e.size(); ++z) {
        const Real d = e.omega[z] - a.apex;
        s += e.mu[z] * e.mu[z] * d * d;
    }
    if (target == 0) return std::abs(s);
    return std::abs(s - target) / target;
}

/// |sum mu^2 omega - apex|
template <class Real>
Real first_moment(const BasicArrowheadMatrix<Real>& a, const BasicEigenSystem<Real>& e) {
    Real s = 0;
    for (std::size_t z = 0; z < e.size(); ++z) s += e.mu[z] * e.mu[z] * e.omega[z];
    return std::abs(s - a.apex);
}

/// max_z ||A v_z - omega_z v_z||_inf / ||A||_inf
template <class Real>
Real residual(const BasicArrowheadMatrix<Real>& a, const BasicEigenSystem<Real>& e) {
    const std::size_t n = a.continuum_size();
    const Real norm = std::max(a.norm_inf(), std::numeric_limits<Real>::min());
    Real worst = 0;
    for (std::size_t z = 0; z < e.size(); ++z) {
        const auto lam = e.lam_row(z);
        Real top = (a.apex - e.omega[z]) * e.mu[z];
        for (std::size_t j = 0; j < n; ++j) top += a.coupling[j] * lam[j];
        Real r = std::abs(top);
        for (std::size_t j = 0; j < n; ++j)
            r = std::max(r, std::abs(a.coupling[j] * e.mu[z] + (a.diag[j] - e.omega[z]) * lam[j]));
        worst = std::max(worst, r);
    }
    return worst / norm;
}

/// Cauchy interlacing omega_i <= d_(i) <= omega_{i+1} (sorted diag),
/// allowing `tol` slack. Returns the largest violation (0 if none).
template <class Real>
Real interlacing(const BasicArrowheadMatrix<Real>& a, const BasicEigenSystem<Real>& e) {
    std::vector<Real> d = a.diag;
    std::sort(d.begin(), d.end());
    Real worst = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        worst = std::max(worst, e.omega[i] - d[i]);
        worst = std::max(worst, d[i] - e.omega[i + 1]);
    }
    return worst;
}

/// Strict interlacing for distinct diagonal entries and nonzero couplings:
/// exactly one eigenvalue in each open gap between consecutive sorted poles
/// and one on each side. Returns the number of gaps violating this.
template <class Real>
std::size_t strict_interlacing_violations(const BasicArrowheadMatrix<Real>& a,
                                          const BasicEigenSystem<Real>& e) {
    std::vector<Real> d = a.diag;
    std::sort(d.begin(), d.end());
    std::size_t bad = 0;
    if (d.empty()) return 0;
    if (!(e.omega.front() < d.front())) ++bad;
    if (!(e.omega.back() > d.back())) ++bad;
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        if (!(e.omega[i + 1] > d[i] && e.omega[i + 1] < d[i + 1])) ++bad;
    return bad;
}

/// max |V V^T - I| over the full eigenvector matrix. O(n^3).
template <class Real>
Real orthogonality(const BasicEigenSystem<Real>& e) {
    const std::size_t dim = e.size();
    const std::size_t n = e.continuum_size();
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> v(dim, dim);
    for (std::size_t z = 0; z < dim; ++z) {
        v(0, static_cast<Eigen::Index>(z)) = e.mu[z];
        for (std::size_t j = 0; j < n; ++j)
            v(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(z)) = e.lambda(z, j);
    }
    const auto eye = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>::Identity(dim, dim);
    return (v * v.transpose() - eye).cwiseAbs().maxCoeff();
}

}  // namespace checks

}  // namespace fanopol
