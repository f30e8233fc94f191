#pragma once

#include <Eigen/Dense>
#include <vector>

#include "drauc/dataset.hpp"

namespace drauc {

/// One opposite-label pair: copies of the i-th positive and the j-th
/// negative feature vectors of the source dataset.
struct Atom {
    Eigen::VectorXd x_plus;
    Eigen::VectorXd x_minus;
    Eigen::Index i_index = 0;  // ordinal among positives
    Eigen::Index j_index = 0;  // ordinal among negatives
};

/// All m = n_pos * n_neg pair atoms in row-major order (positive index
/// outer, negative index inner). Immutable after construction.
struct AtomSet {
    std::vector<Atom> atoms;
    Eigen::Index m = 0;
    Eigen::Index dim = 0;

    const Atom& atom(Eigen::Index k) const { return atoms[static_cast<std::size_t>(k)]; }
};

/// Dense, symmetric ground-distance matrix between pair atoms.
struct DistanceMatrix {
    Eigen::MatrixXd entries;  // m x m
};

/// Largest atom count for which a dense m x m distance matrix will be
/// built; beyond it the pair-transport analysis paths refuse with an
/// explicit error rather than allocate quadratic memory.
inline constexpr Eigen::Index kDefaultAtomCap = 10000;

AtomSet build_atoms(const LabeledDataset& ds);

/// Ground distance between pair atoms: L1 distance between the positive
/// parts plus L1 distance between the negative parts.
double atom_distance(const Atom& a, const Atom& b);

DistanceMatrix distance_matrix(const AtomSet& atoms, Eigen::Index cap = kDefaultAtomCap);

} // namespace drauc
