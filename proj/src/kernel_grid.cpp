#include "volterra/kernel_grid.hpp"

#include "volterra/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace volterra {

namespace {

[[nodiscard]] std::string cell_name(int l, int m) {
    return "(" + std::to_string(l) + ", " + std::to_string(m) + ")";
}

} // namespace

KernelGrid::KernelGrid(double h, int n) : h_(h), n_(n) {
    if (!(h > 0.0)) throw std::invalid_argument("KernelGrid: h must be > 0");
    if (n < 1) throw std::invalid_argument("KernelGrid: size must be >= 1");
    const std::size_t cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    values_.assign(cells, 0.0);
    states_.assign(cells, NodeState::Empty);
    filled_.assign(cells, false);
}

double KernelGrid::node(int k) const {
    if (k < 1 || k > n_) throw std::out_of_range("KernelGrid::node: index outside 1..N");
    return (k - 0.5) * h_;
}

int KernelGrid::index(int l, int m) const {
    if (l < 1 || l > n_ || m < 1 || m > n_) {
        throw std::out_of_range("KernelGrid: cell " + cell_name(l, m) + " outside 1..N x 1..N");
    }
    return (l - 1) * n_ + (m - 1);
}

NodeState KernelGrid::state(int l, int m) const {
    return states_[static_cast<std::size_t>(index(l, m))];
}

bool KernelGrid::has_value(int l, int m) const {
    return filled_[static_cast<std::size_t>(index(l, m))];
}

double KernelGrid::value(int l, int m) const {
    const auto i = static_cast<std::size_t>(index(l, m));
    if (!filled_[i]) {
        throw std::domain_error("KernelGrid::value: cell " + cell_name(l, m) + " holds no value");
    }
    return values_[i];
}

void KernelGrid::set(int l, int m, double v, NodeState st) {
    const auto i = static_cast<std::size_t>(index(l, m));
    if (st == NodeState::Empty) {
        throw std::invalid_argument("KernelGrid::set: cannot assign the Empty state");
    }
    if (states_[i] == NodeState::Prehistory && st == NodeState::Recovered) {
        throw std::invalid_argument("KernelGrid::set: prehistory cell " + cell_name(l, m) +
                                    " must not be overwritten by inversion");
    }
    if (filled_[i]) {
        if (states_[i] != st) {
            throw std::invalid_argument("KernelGrid::set: state conflict at cell " + cell_name(l, m));
        }
        const double scale = std::fmax(1.0, std::fabs(values_[i]));
        if (std::fabs(values_[i] - v) > 1e-12 * scale) {
            throw std::invalid_argument("KernelGrid::set: conflicting duplicate write at cell " +
                                        cell_name(l, m));
        }
        return; // duplicate write with the same value is idempotent
    }
    values_[i] = v;
    states_[i] = st;
    filled_[i] = true;
}

void KernelGrid::mark_prehistory(int l, int m) {
    const auto i = static_cast<std::size_t>(index(l, m));
    if (states_[i] == NodeState::Recovered) {
        throw std::invalid_argument("KernelGrid::mark_prehistory: cell " + cell_name(l, m) +
                                    " is already Recovered");
    }
    states_[i] = NodeState::Prehistory;
}

void KernelGrid::fill_prehistory(const PrehistoryBand& band) {
    for (int l = 1; l <= n_; ++l) {
        for (int m = 1; m <= n_; ++m) {
            if (l != 1 && m != 1) continue;
            set(l, m, prehistory_eval(band, node(l), node(m)), NodeState::Prehistory);
        }
    }
}

} // namespace volterra
