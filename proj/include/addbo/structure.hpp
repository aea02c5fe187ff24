#ifndef ADDBO_STRUCTURE_HPP
#define ADDBO_STRUCTURE_HPP
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "addbo/numerics.hpp"

namespace addbo {

using Group = std::vector<Index>;

/// Checks that `groups` (0-based coordinate indices) partition {0, ..., p-1}.
/// Returns a description of the first violated invariant, or nullopt.
[[nodiscard]] std::optional<std::string> validate(const std::vector<Group>& groups, Index p);

/// A partition of the P input coordinates into M disjoint groups. Groups are
/// kept in ascending order of their smallest coordinate; the coordinate order
/// inside a group is preserved as given.
class AdditiveStructure {
public:
    /// Throws ShapeError if `groups` is not a partition of {0, ..., p-1}.
    AdditiveStructure(std::vector<Group> groups, Index p);

    /// Every coordinate in its own group.
    [[nodiscard]] static AdditiveStructure singletons(Index p);
    /// One group holding all coordinates.
    [[nodiscard]] static AdditiveStructure full(Index p);

    [[nodiscard]] Index num_groups() const noexcept { return static_cast<Index>(groups_.size()); }
    [[nodiscard]] Index dim() const noexcept { return p_; }
    [[nodiscard]] const Group& group(Index m) const;
    [[nodiscard]] Index group_dim(Index m) const { return static_cast<Index>(group(m).size()); }
    [[nodiscard]] const std::vector<Group>& groups() const noexcept { return groups_; }
    [[nodiscard]] Index max_group_dim() const;

    friend bool operator==(const AdditiveStructure&, const AdditiveStructure&) = default;

private:
    std::vector<Group> groups_;
    Index p_;
};

/// Columns of X belonging to group m, in the group's stored order.
[[nodiscard]] Matrix project(const AdditiveStructure& s, Index m, const MatrixRef& x);

/// Capacity-constrained Chinese-restaurant partition: coordinates are visited
/// in random order; each joins an open block with weight equal to its size or
/// starts a new block with weight 1. Full blocks (size == max_dim) are closed.
[[nodiscard]] AdditiveStructure random_partition(Index p, Index max_dim, RngStream& rng);

/// JSON form is an array of 1-based index arrays, e.g. [[1,2],[3]].
[[nodiscard]] nlohmann::json structure_to_json(const AdditiveStructure& s);
[[nodiscard]] AdditiveStructure structure_from_json(const nlohmann::json& j, Index p);

}  // namespace addbo

#endif  // ADDBO_STRUCTURE_HPP
