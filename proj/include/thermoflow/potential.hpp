#pragma once

#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "thermoflow/cat_graph.hpp"
#include "thermoflow/suspension.hpp"

namespace thermoflow {

/// Locally constant potential. On fiber k it takes the value attached to the
/// word x_{k−anchor} … x_{k−anchor+width−1}.
class CylinderPotential {
public:
    CylinderPotential(const Sft& sft, int width, int anchor, const std::map<Word, double>& table);

    /// width 1, one value per symbol
    static CylinderPotential per_symbol(const Sft& sft, const std::vector<double>& values);
    static CylinderPotential constant(const Sft& sft, double c) { return per_symbol(sft, std::vector<double>(sft.size(), c)); }

    int width() const noexcept { return width_; }
    int anchor() const noexcept { return anchor_; }
    std::size_t alphabet() const noexcept { return n_; }

    double at(std::span<const Symbol> word) const;
    double on_fiber(const BiWord& x, long k) const;
    /// Largest |value|.
    double sup_norm() const noexcept { return sup_; }

    CylinderPotential operator+(const CylinderPotential& o) const;
    CylinderPotential scaled(double c) const;

private:
    CylinderPotential() = default;
    std::size_t code(std::span<const Symbol> word) const;

    std::size_t n_ = 0;
    int width_ = 1;
    int anchor_ = 0;
    std::vector<double> values_;  // base-n code; NaN off the language
    double sup_ = 0;
};

/// γ ↦ scale · d_GX(γ, reference) on a graph flow.
struct DistancePotential {
    std::shared_ptr<const GraphFlow> graph;
    Geodesic reference;
    double scale = 1;

    double operator()(const Geodesic& g) const { return scale * graph->dgx(g, reference).value; }
};

using Potential = std::variant<CylinderPotential, DistancePotential>;

/// Φ(x, t) = ∫₀ᵗ φ(f_s x) ds. Exact for cylinder potentials; adaptive
/// Simpson with absolute tolerance 1e−8·t otherwise.
double birkhoff(const FlowSystem& sys, const Potential& phi, const OrbitSegment& seg);

/// Φ(γ) of a cylinder potential around a cyclic word, read cyclically.
double cycle_integral(const FlowSystem& sys, const CylinderPotential& phi, std::span<const Symbol> cycle);

/// Φ(γ) around a closed orbit given by a cyclic word.
double orbit_integral(const FlowSystem& sys, const Potential& phi, const Word& cycle);

/// Cylinder approximation of a distance potential: anchor in the middle, value
/// = fiber average over the embedded word, 8-node Gauss–Legendre per fiber.
CylinderPotential approximate(const FlowSystem& sys, const DistancePotential& phi, int width);

/// Higher block presentation for a width-w cylinder potential: states are
/// admissible w-words, state u moves to v when u shifted by one is v's prefix.
struct BlockSystem {
    int width = 1;
    int anchor = 0;
    std::vector<Word> states;
    std::vector<std::vector<int>> succ;
    std::vector<Symbol> emit;     // the fiber symbol u[anchor]
    std::vector<double> roof;     // r(u[anchor])
    std::vector<double> fiber;    // φ̂(u) = φ(u)·r(u[anchor]); zero when built without potential
};

BlockSystem block_system(const FlowSystem& sys, int width, int anchor);
BlockSystem block_system(const FlowSystem& sys, const CylinderPotential& phi);

/// All admissible words of a given length, lexicographic.
std::vector<Word> admissible_words(const Sft& sft, int length);

}  // namespace thermoflow
