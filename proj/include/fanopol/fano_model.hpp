#pragma once

// The reduced Fano problem of one injected electron: apex = bare electron
// in the second subband, continuum = annular bright polariton states.
// Every diagonal entry of the full matrix carries omega_1(k); it is dropped
// here so one decomposition serves all k > k_F.

#include <cstddef>
#include <utility>
#include <vector>

#include "fanopol/arrowhead.hpp"
#include "fanopol/core_model.hpp"
#include "fanopol/polariton.hpp"

namespace fanopol {

/// Continuum layout: ring i occupies positions 2i (upper branch) and 2i+1
/// (lower branch).
constexpr std::size_t continuum_position(Branch b, std::size_t ring) noexcept {
    return 2 * ring + (b == Branch::upper ? 0 : 1);
}

inline ArrowheadMatrix build_fano_matrix(const PolaritonTable& table, const DeviceParams& p) {
    if (table.size() == 0) throw ParameterError("arrowhead-solver", "empty q grid");
    ArrowheadMatrix a;
    a.apex = p.omega12;
    a.source_fingerprint = p.fingerprint();
    const std::size_t n = 2 * table.size();
    a.diag.resize(n);
    a.coupling.resize(n);
    a.ring_index.resize(n);
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (Branch b : {Branch::upper, Branch::lower}) {
            const std::size_t pos = continuum_position(b, i);
            a.diag[pos] = table.frequency(b, i);
            a.coupling[pos] = table.coupling(b, i);
            a.ring_index[pos] = {b, i};
        }
    }
    a.validate();
    return a;
}

inline ArrowheadMatrix build_fano_matrix(const QGrid& grid, const DeviceParams& p) {
    if (grid.empty()) throw ParameterError("arrowhead-solver", "empty q grid");
    return build_fano_matrix(make_polariton_table(grid, p), p);
}

/// Everything derived from one parameter set and ring grid.
struct FanoModel {
    DeviceParams params;
    PolaritonTable table;
    ArrowheadMatrix matrix;
    EigenSystem eig;

    static FanoModel build(const DeviceParams& p, const QGrid& grid, const SecularOptions& opt = {}) {
        p.validate();
        resonant_wavevector(p);
        FanoModel m;
        m.params = p;
        m.table = make_polariton_table(grid, p);
        m.matrix = build_fano_matrix(m.table, p);
        m.eig = eigendecompose_arrowhead(m.matrix, opt);
        return m;
    }

    static FanoModel build(const DeviceParams& p, const GridSpec& spec = {}, const SecularOptions& opt = {}) {
        p.validate();
        return build(p, spec.make(p), opt);
    }

    std::size_t rings() const noexcept { return table.size(); }
    std::size_t states() const noexcept { return eig.size(); }
};

}  // namespace fanopol
