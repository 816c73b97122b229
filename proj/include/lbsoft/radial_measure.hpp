// Radius distributions: an atom at r = 1, a diagnostic atom at r = 0, cell
// masses on a fixed grid, and an overflow bucket beyond r_max.

#pragma once

#include "lbsoft/geometry.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lbsoft {

struct GridSpec
{
    int levels = 24;              // J: geometric offsets 1 +- eps_max 2^-j, j = 0..J
    double eps_max = 0.5;
    double background_h = 1.0 / 128.0;
    double r_max = 4.0;

    void validate() const;
};

// Where a deposit at radius r lands.
struct DepositTarget
{
    bool overflow = false;
    int lo = 0;                   // cell indices; hi == lo for a single-cell deposit
    int hi = 0;
    double w_lo = 1.0;
    double w_hi = 0.0;
};

class RadialGrid
{
public:
    static RadialGrid make(const GridSpec& spec);
    // Arbitrary edges starting at 0; throws std::invalid_argument unless
    // strictly increasing.
    static RadialGrid from_edges(std::vector<double> edges);

    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& midpoints() const { return mid_; }
    int cells() const { return static_cast<int>(mid_.size()); }
    double r_max() const { return edges_.back(); }
    double lo(int i) const { return edges_[i]; }
    double hi(int i) const { return edges_[i + 1]; }
    double width(int i) const { return edges_[i + 1] - edges_[i]; }
    double min_width() const;
    double max_width() const;

    // Cell with lo <= r < hi; -1 below 0, cells() at or beyond r_max.
    int locate(double r) const;

    // Two-cell split between the bracketing midpoints preserving the mean.
    // Radii below the first midpoint or above the last one (but <= r_max)
    // go entirely to the end cell.
    DepositTarget deposit_target(double r) const;

    bool operator==(const RadialGrid& o) const { return edges_ == o.edges_; }

private:
    std::vector<double> edges_;
    std::vector<double> mid_;
};

class RadialMeasure
{
public:
    explicit RadialMeasure(std::shared_ptr<const RadialGrid> grid);

    static RadialMeasure dirac_at_one(std::shared_ptr<const RadialGrid> grid);

    const RadialGrid& grid() const { return *grid_; }
    std::shared_ptr<const RadialGrid> grid_ptr() const { return grid_; }

    double atom_at_1 = 0.0;
    double atom_at_0 = 0.0;
    std::vector<double> cell_mass;
    double overflow = 0.0;

    double total() const;
    double density_total() const;
    bool has_atoms() const { return atom_at_1 > 0.0 || atom_at_0 > 0.0; }

    // Throws std::invalid_argument for negative m.
    void deposit(double r, double m);

    // lambda({r : |r^2 - 1| <= eps}), partial cells by linear fraction.
    double window_mass(double eps) const;

    // Atoms at their radius, cells at midpoints, overflow at r_max.
    double first_moment() const;

    // f(v) = lambda(|v|) / (2 pi |v|); 0 at v = 0; nullopt when |v| carries an atom.
    std::optional<double> density_2d(Velocity v) const;

    RadialMeasure& operator+=(const RadialMeasure& o);
    RadialMeasure& operator*=(double s);

private:
    std::shared_ptr<const RadialGrid> grid_;
};

// Integral of |F_a - F_b| over [0, r_max]; throws std::invalid_argument on
// grid mismatch or total-mass mismatch beyond 1e-8.
double wasserstein1(const RadialMeasure& a, const RadialMeasure& b);

// CSV snapshot, header `kind,r_lo,r_hi,mass`, 17 significant digits.
void write_snapshot(std::ostream& os, const RadialMeasure& m);
// Reads a snapshot; the grid is rebuilt from the cell rows.
RadialMeasure read_snapshot(std::istream& is);

// printf("%.17g") as a string; "inf"/"-inf"/"nan" for non-finite.
std::string format_real(double x);

} // namespace lbsoft
