#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "swarmcov/geometry.hpp"

namespace swarmcov {

// Node placement on a regular m1 x m2 grid over the domain.
//  cell_centers: m1 x m2 cells, nodes at cell midpoints (rectangle rule).
//  cell_corners: nodes at cell corners including the boundary
//                (trapezoid / Simpson rules, gridded densities).
enum class GridNodes { cell_centers, cell_corners };

struct GridSpec {
    int m1 = 0;
    int m2 = 0;
    GridNodes nodes = GridNodes::cell_centers;
    Domain domain;

    GridSpec() = default;
    GridSpec(int m1_, int m2_, GridNodes nodes_, const Domain& dom)
        : m1(m1_), m2(m2_), nodes(nodes_), domain(dom) {
        if (m1 < 2 || m2 < 2)
            throw parameter_error("GridSpec: need at least 2 nodes per axis");
    }

    std::size_t size() const { return static_cast<std::size_t>(m1) * m2; }

    double dx() const {
        return nodes == GridNodes::cell_centers ? domain.width / m1
                                                : domain.width / (m1 - 1);
    }
    double dy() const {
        return nodes == GridNodes::cell_centers ? domain.height / m2
                                                : domain.height / (m2 - 1);
    }
    double x0() const { return nodes == GridNodes::cell_centers ? 0.5 * dx() : 0.0; }
    double y0() const { return nodes == GridNodes::cell_centers ? 0.5 * dy() : 0.0; }

    double node_x(int i) const { return x0() + i * dx(); }
    double node_y(int j) const { return y0() + j * dy(); }
    Vec2 node(int i, int j) const { return {node_x(i), node_y(j)}; }

    // Row-major, x fastest.
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * m1 + i; }
};

struct ScalarField {
    GridSpec grid;
    std::vector<double> values; // row-major, x fastest

    ScalarField() = default;
    ScalarField(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size())
            throw parameter_error("ScalarField: value count does not match grid");
    }

    double at(int i, int j) const { return values[grid.index(i, j)]; }
    double& at(int i, int j) { return values[grid.index(i, j)]; }
};

} // namespace swarmcov
