#include "cmdp/types.hpp"

#include <stdexcept>
#include <string>

namespace cmdp {

LayerPartition::LayerPartition(std::vector<std::vector<State>> layers) : layers_(std::move(layers)) {
    if (layers_.size() < 2) throw std::invalid_argument("layer partition needs H >= 1");
    if (layers_.front().size() != 1) throw std::invalid_argument("first layer must be a singleton");
    if (layers_.back().size() != 1) throw std::invalid_argument("last layer must be a singleton");

    std::size_t total = 0;
    for (const auto& layer : layers_) {
        if (layer.empty()) throw std::invalid_argument("empty layer");
        total += layer.size();
    }
    constexpr std::size_t unassigned = static_cast<std::size_t>(-1);
    layer_of_.assign(total, unassigned);
    for (std::size_t h = 0; h < layers_.size(); ++h) {
        for (State s : layers_[h]) {
            if (s >= total)
                throw std::invalid_argument("state index " + std::to_string(s) + " out of range");
            if (layer_of_[s] != unassigned)
                throw std::invalid_argument("state " + std::to_string(s) + " appears in two layers");
            layer_of_[s] = h;
        }
    }
}

std::span<const State> LayerPartition::successors(State s) const {
    const std::size_t h = layer_of(s);
    if (h == horizon()) return {};
    return layers_[h + 1];
}

bool LayeredCMDP::has_shared_dynamics() const {
    for (std::size_t c = 1; c < dynamics.size(); ++c) {
        if (dynamics[c] != dynamics[0] && !(*dynamics[c] == *dynamics[0])) return false;
    }
    return true;
}

std::uint64_t DeterministicPolicy::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (Action a : action_of) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (static_cast<std::uint64_t>(a) >> (8 * byte)) & 0xFFU;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

double Trajectory::total_reward() const {
    double sum = 0.0;
    for (const auto& step : steps) sum += step.reward;
    return sum;
}

}  // namespace cmdp
