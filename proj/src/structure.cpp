#include "addbo/structure.hpp"

#include <algorithm>
#include <numeric>

#include "addbo/errors.hpp"

namespace addbo {

std::optional<std::string> validate(const std::vector<Group>& groups, Index p) {
    if (p < 1) {
        return "dimension must be at least 1";
    }
    std::vector<int> seen(static_cast<std::size_t>(p), 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) {
            return "group " + std::to_string(g + 1) + " is empty";
        }
        for (Index c : groups[g]) {
            if (c < 0 || c >= p) {
                return "coordinate " + std::to_string(c + 1) + " out of range 1.." + std::to_string(p);
            }
            if (seen[static_cast<std::size_t>(c)]++ > 0) {
                return "overlap at coordinate " + std::to_string(c + 1);
            }
        }
    }
    for (Index c = 0; c < p; ++c) {
        if (seen[static_cast<std::size_t>(c)] == 0) {
            return "coordinate " + std::to_string(c + 1) + " uncovered";
        }
    }
    return std::nullopt;
}

AdditiveStructure::AdditiveStructure(std::vector<Group> groups, Index p) : groups_(std::move(groups)), p_(p) {
    if (auto violation = validate(groups_, p_)) {
        throw ShapeError("AdditiveStructure: " + *violation);
    }
    std::stable_sort(groups_.begin(), groups_.end(), [](const Group& a, const Group& b) {
        return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
    });
}

AdditiveStructure AdditiveStructure::singletons(Index p) {
    std::vector<Group> groups;
    for (Index c = 0; c < p; ++c) {
        groups.push_back({c});
    }
    return AdditiveStructure(std::move(groups), p);
}

AdditiveStructure AdditiveStructure::full(Index p) {
    Group all(static_cast<std::size_t>(std::max<Index>(p, 0)));
    std::iota(all.begin(), all.end(), Index{0});
    return AdditiveStructure({all}, p);
}

const Group& AdditiveStructure::group(Index m) const {
    if (m < 0 || m >= num_groups()) {
        throw ShapeError("group index " + std::to_string(m) + " out of range");
    }
    return groups_[static_cast<std::size_t>(m)];
}

Index AdditiveStructure::max_group_dim() const {
    std::size_t largest = 0;
    for (const auto& g : groups_) {
        largest = std::max(largest, g.size());
    }
    return static_cast<Index>(largest);
}

Matrix project(const AdditiveStructure& s, Index m, const MatrixRef& x) {
    const Group& g = s.group(m);
    if (x.cols() != s.dim()) {
        throw ShapeError("project: input has " + std::to_string(x.cols()) + " columns, structure dimension is " +
                         std::to_string(s.dim()));
    }
    Matrix out(x.rows(), static_cast<Index>(g.size()));
    for (std::size_t j = 0; j < g.size(); ++j) {
        out.col(static_cast<Index>(j)) = x.col(g[j]);
    }
    return out;
}

AdditiveStructure random_partition(Index p, Index max_dim, RngStream& rng) {
    if (p < 1 || max_dim < 1) {
        throw PreconditionError("random_partition: p and max_dim must be at least 1");
    }
    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng.engine());

    std::vector<Group> blocks;
    for (Index c : order) {
        double total = 1.0;
        for (const auto& b : blocks) {
            if (static_cast<Index>(b.size()) < max_dim) {
                total += static_cast<double>(b.size());
            }
        }
        double u = rng.uniform() * total;
        bool placed = false;
        for (auto& b : blocks) {
            if (static_cast<Index>(b.size()) >= max_dim) {
                continue;
            }
            u -= static_cast<double>(b.size());
            if (u < 0.0) {
                b.push_back(c);
                placed = true;
                break;
            }
        }
        if (!placed) {
            blocks.push_back({c});
        }
    }
    for (auto& b : blocks) {
        std::sort(b.begin(), b.end());
    }
    return AdditiveStructure(std::move(blocks), p);
}

nlohmann::json structure_to_json(const AdditiveStructure& s) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& g : s.groups()) {
        nlohmann::json arr = nlohmann::json::array();
        for (Index c : g) {
            arr.push_back(c + 1);
        }
        out.push_back(std::move(arr));
    }
    return out;
}

AdditiveStructure structure_from_json(const nlohmann::json& j, Index p) {
    if (!j.is_array()) {
        throw ShapeError("structure JSON must be an array of index arrays");
    }
    std::vector<Group> groups;
    for (const auto& g : j) {
        if (!g.is_array()) {
            throw ShapeError("structure JSON must be an array of index arrays");
        }
        Group group;
        for (const auto& c : g) {
            group.push_back(c.get<Index>() - 1);
        }
        groups.push_back(std::move(group));
    }
    return AdditiveStructure(std::move(groups), p);
}

}  // namespace addbo
