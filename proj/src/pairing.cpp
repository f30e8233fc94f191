#include "drauc/pairing.hpp"

#include <string>

#include "drauc/errors.hpp"

namespace drauc {

AtomSet build_atoms(const LabeledDataset& ds) {
    ds.validate();
    const std::vector<Eigen::Index> pos = ds.positive_indices();
    const std::vector<Eigen::Index> neg = ds.negative_indices();
    if (pos.empty() || neg.empty())
        throw DataError("pair atoms require at least one point of each class");

    AtomSet set;
    set.dim = ds.cols();
    set.m = static_cast<Eigen::Index>(pos.size() * neg.size());
    set.atoms.reserve(static_cast<std::size_t>(set.m));
    for (std::size_t i = 0; i < pos.size(); ++i) {
        for (std::size_t j = 0; j < neg.size(); ++j) {
            Atom a;
            a.x_plus = ds.features.row(pos[i]).transpose();
            a.x_minus = ds.features.row(neg[j]).transpose();
            a.i_index = static_cast<Eigen::Index>(i);
            a.j_index = static_cast<Eigen::Index>(j);
            set.atoms.push_back(std::move(a));
        }
    }
    return set;
}

double atom_distance(const Atom& a, const Atom& b) {
    if (a.x_plus.size() != b.x_plus.size() || a.x_minus.size() != b.x_minus.size())
        throw DataError("atom dimension mismatch");
    return (a.x_plus - b.x_plus).lpNorm<1>() + (a.x_minus - b.x_minus).lpNorm<1>();
}

DistanceMatrix distance_matrix(const AtomSet& atoms, Eigen::Index cap) {
    if (atoms.m < 1) throw DataError("empty atom set");
    if (atoms.m > cap)
        throw DataError("atom count " + std::to_string(atoms.m) +
                        " exceeds the dense distance-matrix cap of " + std::to_string(cap));
    DistanceMatrix d;
    d.entries = Eigen::MatrixXd::Zero(atoms.m, atoms.m);
    for (Eigen::Index i = 0; i < atoms.m; ++i) {
        for (Eigen::Index j = i + 1; j < atoms.m; ++j) {
            const double v = atom_distance(atoms.atom(i), atoms.atom(j));
            d.entries(i, j) = v;
            d.entries(j, i) = v;
        }
    }
    return d;
}

} // namespace drauc
