#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wassmob/density.hpp"
#include "wassmob/embedding.hpp"
#include "wassmob/kantorovich.hpp"
#include "wassmob/maps.hpp"
#include "wassmob/mobility.hpp"

namespace wassmob {

// CSV layout: header line, then one row per node (coords..., value...).
void write_density_csv(const std::filesystem::path& path, const Density& rho);
Density read_density_csv(const std::filesystem::path& path, const Grid& g);

// mobility: node coords followed by the friction entries B (d=1: one column,
// d=2: b00,b01,b10,b11)
void write_mobility_csv(const std::filesystem::path& path, const MobilityField& B);
std::vector<double> read_scalar_column_csv(const std::filesystem::path& path,
                                           std::size_t expected_rows);

void write_embedding_csv(const std::filesystem::path& path, const EmbeddingMap& b);

// map: source coords, target coords (if available), embedded target, mass
void write_map_csv(const std::filesystem::path& path, const TransportMap& map,
                   const Density& rho0);

void write_distance_report_json(const std::filesystem::path& path, const DistanceReport& rep);

// coupling in coordinate-triplet (i, j, mass) sparse text form
void write_coupling_coo(const std::filesystem::path& path, const Coupling& cp,
                        double threshold = 1e-15);

// long-format plot bundle rows: series,x,y
struct PlotRow {
    std::string series;
    double x = 0.0, y = 0.0;
};
void write_plot_csv(const std::filesystem::path& path, const std::vector<PlotRow>& rows);

std::string fnv1a_file_hash(const std::filesystem::path& path);

}  // namespace wassmob
