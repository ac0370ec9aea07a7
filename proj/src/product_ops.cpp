#include "aniso_heat/product_ops.hpp"

#include "aniso_heat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace aniso_heat {

int BlockPartition::total_dim() const {
    int n = 0;
    for (int b : blocks) n += b;
    return n;
}

void BlockPartition::validate() const {
    if (blocks.empty()) throw validation_error("BlockPartition: empty block list");
    for (int b : blocks)
        if (b < 1) throw validation_error("BlockPartition: block sizes must be >= 1");
    if (total_dim() > 3)
        throw validation_error("BlockPartition: gridded use supports total dimension <= 3");
    if (!(sigma > 0.0 && sigma < 2.0)) throw validation_error("BlockPartition: sigma outside (0,2)");
}

namespace {

// Measure of the unit-symbol isotropic operator in dimension b: symbol
// |ξ|^σ exactly (atom for b = 1, normalized uniform density otherwise).
SpectralMeasure unit_symbol_measure(int b, double sigma) {
    const double c_sig = stable_constant(sigma);
    if (b == 1) {
        SpectralMeasure::Atom atom;
        atom.dir = {1.0};
        atom.weight = 1.0 / c_sig;
        return SpectralMeasure(1, {atom}, {});
    }
    const SphereRule rule = sphere_rule(b);
    double q = 0.0;
    for (std::size_t i = 0; i < rule.count(); ++i)
        q += rule.weights[i] * std::pow(std::abs(rule.dir(i)[0]), sigma);
    std::vector<SpectralMeasure::DensityNode> nodes;
    nodes.reserve(rule.count());
    for (std::size_t i = 0; i < rule.count(); ++i) {
        SpectralMeasure::DensityNode node;
        node.dir.assign(rule.dir(i), rule.dir(i) + b);
        node.value = 1.0 / (c_sig * q);
        node.qweight = rule.weights[i];
        nodes.push_back(std::move(node));
    }
    return SpectralMeasure(b, {}, std::move(nodes));
}

// Sum-of-fractional-Laplacians measure on the full space for the partition.
SpectralMeasure partition_measure(const BlockPartition& partition) {
    const int dim = partition.total_dim();
    const double c_sig = stable_constant(partition.sigma);
    std::vector<SpectralMeasure::Atom> atoms;
    std::vector<SpectralMeasure::DensityNode> density;
    int offset = 0;
    for (int b : partition.blocks) {
        if (b == 1) {
            SpectralMeasure::Atom atom;
            atom.dir.assign(dim, 0.0);
            atom.dir[offset] = 1.0;
            atom.weight = 1.0 / c_sig;
            atoms.push_back(std::move(atom));
        } else {
            const SphereRule sub = sphere_rule(b);
            double q = 0.0;
            for (std::size_t i = 0; i < sub.count(); ++i)
                q += sub.weights[i] * std::pow(std::abs(sub.dir(i)[0]), partition.sigma);
            for (std::size_t i = 0; i < sub.count(); ++i) {
                SpectralMeasure::DensityNode node;
                node.dir.assign(dim, 0.0);
                for (int d = 0; d < b; ++d) node.dir[offset + d] = sub.dir(i)[d];
                node.value = 1.0 / (c_sig * q);
                node.qweight = sub.weights[i];
                density.push_back(std::move(node));
            }
        }
        offset += b;
    }
    return SpectralMeasure(dim, std::move(atoms), std::move(density));
}

struct AxisMap {
    std::int64_t j0 = 0;
    std::int64_t stride = 1;
    std::int64_t index(int i) const { return j0 + stride * i; }
};

AxisMap axis_alignment(const SpatialGrid& assembled, const SpatialGrid& factor) {
    const double c = assembled.h() / factor.h();
    const double j0 = (factor.box - assembled.box) / factor.h();
    AxisMap map;
    map.stride = static_cast<std::int64_t>(std::llround(c));
    map.j0 = static_cast<std::int64_t>(std::llround(j0));
    if (std::abs(c - static_cast<double>(map.stride)) > 1e-9 ||
        std::abs(j0 - static_cast<double>(map.j0)) > 1e-9 || map.j0 < 0 ||
        map.j0 + map.stride * (assembled.n - 1) > factor.n - 1) {
        std::ostringstream os;
        os << "product_profile: assembled axis (n=" << assembled.n << ", box=" << assembled.box
           << ") does not land on factor nodes (n=" << factor.n << ", box=" << factor.box << ")";
        throw validation_error(os.str());
    }
    return map;
}

} // namespace

ClosedFormCauchy closed_form_sigma1(int block_dim, double sigma) {
    if (std::abs(sigma - 1.0) > 1e-12)
        throw validation_error("closed_form_sigma1: closed form available only at sigma = 1");
    if (block_dim < 1) throw validation_error("closed_form_sigma1: dimension must be >= 1");
    ClosedFormCauchy cf;
    cf.block_dim = block_dim;
    cf.d_n = std::tgamma(0.5 * (block_dim + 1)) / std::pow(std::numbers::pi, 0.5 * (block_dim + 1));
    return cf;
}

double ClosedFormCauchy::operator()(double radius) const {
    return d_n * std::pow(1.0 + radius * radius, -0.5 * (block_dim + 1));
}

ProductProfile product_profile(const BlockPartition& partition, const SpatialGrid& assembled_grid,
                               const std::vector<SpatialGrid>& factor_grids) {
    partition.validate();
    const int dim = partition.total_dim();
    if (assembled_grid.dim != dim)
        throw validation_error("product_profile: assembled grid dimension mismatch");
    if (!factor_grids.empty() && factor_grids.size() != partition.blocks.size())
        throw validation_error("product_profile: need one factor grid per block");

    // Factor profiles. One-dimensional factors default to a much larger box
    // at twice the resolution, which keeps their periodized tails far away;
    // higher-dimensional factors default to the assembled axes.
    std::vector<KernelProfile> factors;
    for (std::size_t k = 0; k < partition.blocks.size(); ++k) {
        const int b = partition.blocks[k];
        SpatialGrid fgrid = !factor_grids.empty()
                                ? factor_grids[k]
                                : (b == 1 ? SpatialGrid(1, 65536, assembled_grid.h() * 16384.0)
                                          : SpatialGrid(b, assembled_grid.n, assembled_grid.box));
        if (fgrid.dim != b) throw validation_error("product_profile: factor grid dimension mismatch");
        SymbolField fsym(unit_symbol_measure(b, partition.sigma), partition.sigma);
        factors.push_back(build_profile(fsym, fgrid));
    }

    // Axis maps (assembled axis -> factor axis) per block.
    std::vector<AxisMap> maps;
    for (std::size_t k = 0; k < partition.blocks.size(); ++k)
        maps.push_back(axis_alignment(assembled_grid, factors[k].grid));

    SymbolField symbol(partition_measure(partition), partition.sigma);
    KernelProfile assembled{assembled_grid, symbol, {}, {}, {}, {}, {}, {}, 0.0, 0.0};
    const std::int64_t size = assembled_grid.size();
    assembled.phi.resize(static_cast<std::size_t>(size));
    assembled.lphi.resize(static_cast<std::size_t>(size));
    assembled.l2phi.resize(static_cast<std::size_t>(size));
    for (int d = 0; d < dim; ++d) {
        assembled.grad[d].resize(static_cast<std::size_t>(size));
        assembled.grad_l[d].resize(static_cast<std::size_t>(size));
    }

    const std::size_t nblocks = partition.blocks.size();
    std::vector<int> block_offset(nblocks);
    {
        int off = 0;
        for (std::size_t k = 0; k < nblocks; ++k) {
            block_offset[k] = off;
            off += partition.blocks[k];
        }
    }

    parallel_for(size, [&](std::int64_t idx) {
        int iv[3];
        {
            std::int64_t rem = idx;
            for (int d = dim - 1; d >= 0; --d) {
                iv[d] = static_cast<int>(rem % assembled_grid.n);
                rem /= assembled_grid.n;
            }
        }
        double psi[3], lpsi[3], l2psi[3];
        double dpsi[3][3], dlpsi[3][3];
        for (std::size_t k = 0; k < nblocks; ++k) {
            const int b = partition.blocks[k];
            const KernelProfile& f = factors[k];
            std::int64_t fidx = 0;
            for (int a = 0; a < b; ++a)
                fidx = fidx * f.grid.n + maps[k].index(iv[block_offset[k] + a]);
            const std::size_t fu = static_cast<std::size_t>(fidx);
            psi[k] = f.phi[fu];
            lpsi[k] = f.lphi[fu];
            l2psi[k] = f.l2phi[fu];
            for (int a = 0; a < b; ++a) {
                dpsi[k][a] = f.grad[a][fu];
                dlpsi[k][a] = f.grad_l[a][fu];
            }
        }
        double phi = 1.0;
        for (std::size_t k = 0; k < nblocks; ++k) phi *= psi[k];
        // Quotients are safe: factors are strictly positive; the floor only
        // guards underflow in the deep tail.
        double lsum = 0.0, l2sum = 0.0;
        double lq[3];
        for (std::size_t k = 0; k < nblocks; ++k) {
            const double den = std::max(psi[k], 1e-300);
            lq[k] = lpsi[k] / den;
            lsum += lq[k];
            l2sum += l2psi[k] / den;
        }
        double cross = 0.0;
        for (std::size_t k = 0; k < nblocks; ++k)
            for (std::size_t l = k + 1; l < nblocks; ++l) cross += lq[k] * lq[l];

        const std::size_t u = static_cast<std::size_t>(idx);
        assembled.phi[u] = phi;
        assembled.lphi[u] = phi * lsum;
        assembled.l2phi[u] = phi * (l2sum + 2.0 * cross);
        for (std::size_t k = 0; k < nblocks; ++k) {
            const int b = partition.blocks[k];
            const double den = std::max(psi[k], 1e-300);
            for (int a = 0; a < b; ++a) {
                const int m = block_offset[k] + a;
                const double gq = dpsi[k][a] / den;
                assembled.grad[m][u] = phi * gq;
                assembled.grad_l[m][u] = phi * (dlpsi[k][a] / den - lq[k] * gq + gq * lsum);
            }
        }
    });

    // The assembled box is a window onto the product of (unit-mass) factors,
    // so the mass ledger carries the factor product, not the window sum.
    assembled.mass = 1.0;
    for (const auto& f : factors) assembled.mass *= f.mass;
    assembled.max_phi = *std::max_element(assembled.phi.begin(), assembled.phi.end());

    assembled.multiplier.resize(static_cast<std::size_t>(size));
    parallel_for(size, [&](std::int64_t idx) {
        int k[3];
        {
            std::int64_t rem = idx;
            for (int d = dim - 1; d >= 0; --d) {
                k[d] = static_cast<int>(rem % assembled_grid.n);
                rem /= assembled_grid.n;
            }
        }
        double xi[3];
        for (int d = 0; d < dim; ++d) xi[d] = assembled_grid.freq(k[d]);
        assembled.multiplier[static_cast<std::size_t>(idx)] = symbol.m(xi);
    });

    return ProductProfile{partition, std::move(factors), std::move(assembled)};
}

double gradient_ratio_bound(const KernelProfile& profile) {
    const SpatialGrid& grid = profile.grid;
    const int dim = grid.dim;
    const double half = 0.5 * grid.box;
    const std::int64_t size = grid.size();
    double best = 0.0;
    for (std::int64_t idx = 0; idx < size; ++idx) {
        int iv[3];
        std::int64_t rem = idx;
        for (int d = dim - 1; d >= 0; --d) {
            iv[d] = static_cast<int>(rem % grid.n);
            rem /= grid.n;
        }
        bool inner = true;
        for (int d = 0; d < dim; ++d)
            if (std::abs(grid.coord(iv[d])) > half) inner = false;
        if (!inner) continue;
        const std::size_t u = static_cast<std::size_t>(idx);
        double g2 = 0.0, gl2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            g2 += profile.grad[d][u] * profile.grad[d][u];
            gl2 += profile.grad_l[d][u] * profile.grad_l[d][u];
        }
        const double num = std::max({std::abs(profile.lphi[u]), std::sqrt(g2), std::sqrt(gl2)});
        best = std::max(best, num / std::max(profile.phi[u], 1e-300));
    }
    return best;
}

} // namespace aniso_heat
