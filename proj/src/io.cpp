#include "wassmob/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>

#include "wassmob/errors.hpp"

namespace wassmob {

namespace {
std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IOError("cannot open for writing: " + p.string());
    out.precision(17);
    return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw IOError("cannot open for reading: " + p.string());
    return in;
}

void write_coords(std::ofstream& out, const Grid& g, std::size_t i) {
    auto x = g.node(i);
    out << x[0];
    if (g.dim() == 2) out << ',' << x[1];
}
}  // namespace

void write_density_csv(const std::filesystem::path& path, const Density& rho) {
    auto out = open_out(path);
    const Grid& g = rho.grid();
    out << (g.dim() == 1 ? "x,value\n" : "x0,x1,value\n");
    for (std::size_t i = 0; i < rho.size(); ++i) {
        write_coords(out, g, i);
        out << ',' << rho[i] << '\n';
    }
}

Density read_density_csv(const std::filesystem::path& path, const Grid& g) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> vals;
    vals.reserve(g.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto pos = line.find_last_of(',');
        if (pos == std::string::npos)
            throw ParseError("density csv: malformed row '" + line + "'");
        try {
            vals.push_back(std::stod(line.substr(pos + 1)));
        } catch (const std::exception&) {
            throw ParseError("density csv: bad value in row '" + line + "'");
        }
    }
    if (vals.size() != g.size())
        throw GridMismatch("density csv: row count does not match the grid");
    return Density(g, std::move(vals), /*normalize=*/true);
}

void write_mobility_csv(const std::filesystem::path& path, const MobilityField& B) {
    auto out = open_out(path);
    const Grid& g = B.grid();
    out << (g.dim() == 1 ? "x,b\n" : "x0,x1,b00,b01,b10,b11\n");
    for (std::size_t i = 0; i < B.size(); ++i) {
        write_coords(out, g, i);
        const Mat2& m = B.B(i);
        if (g.dim() == 1)
            out << ',' << m[0] << '\n';
        else
            out << ',' << m[0] << ',' << m[1] << ',' << m[2] << ',' << m[3] << '\n';
    }
}

std::vector<double> read_scalar_column_csv(const std::filesystem::path& path,
                                           std::size_t expected_rows) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto pos = line.find_last_of(',');
        try {
            vals.push_back(std::stod(pos == std::string::npos ? line : line.substr(pos + 1)));
        } catch (const std::exception&) {
            throw ParseError("csv: bad value in row '" + line + "'");
        }
    }
    if (vals.size() != expected_rows) throw GridMismatch("csv: unexpected row count");
    return vals;
}

void write_embedding_csv(const std::filesystem::path& path, const EmbeddingMap& b) {
    auto out = open_out(path);
    const Grid& g = b.grid();
    out << (g.dim() == 1 ? "x,b0" : "x0,x1,b0,b1") << "\n";
    for (std::size_t i = 0; i < b.size(); ++i) {
        write_coords(out, g, i);
        out << ',' << b.value(i)[0];
        if (g.dim() == 2) out << ',' << b.value(i)[1];
        out << '\n';
    }
}

void write_map_csv(const std::filesystem::path& path, const TransportMap& map,
                   const Density& rho0) {
    auto out = open_out(path);
    const Grid& g = map.grid;
    out << (g.dim() == 1 ? "x,target,embedded_target,mass,defined\n"
                         : "x0,x1,target0,target1,embedded0,embedded1,mass,defined\n");
    for (std::size_t i = 0; i < map.embedded_image.size(); ++i) {
        write_coords(out, g, i);
        if (g.dim() == 1)
            out << ',' << map.image[i][0] << ',' << map.embedded_image[i][0];
        else
            out << ',' << map.image[i][0] << ',' << map.image[i][1] << ','
                << map.embedded_image[i][0] << ',' << map.embedded_image[i][1];
        out << ',' << rho0.mass(i) << ',' << int(map.defined[i]) << '\n';
    }
}

void write_distance_report_json(const std::filesystem::path& path, const DistanceReport& rep) {
    nlohmann::json j;
    j["wa_squared"] = rep.wa_squared;
    j["method"] = rep.method;
    if (rep.dual_value) j["dual_value"] = *rep.dual_value;
    if (rep.gap) j["gap"] = *rep.gap;
    j["marginal_defect"] = rep.marginal_defect;
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_coupling_coo(const std::filesystem::path& path, const Coupling& cp,
                        double threshold) {
    auto out = open_out(path);
    out << "i,j,mass\n";
    for (std::size_t i = 0; i < cp.n; ++i)
        for (std::size_t j = 0; j < cp.n; ++j)
            if (cp.pi[i * cp.n + j] > threshold)
                out << i << ',' << j << ',' << cp.pi[i * cp.n + j] << '\n';
}

void write_plot_csv(const std::filesystem::path& path, const std::vector<PlotRow>& rows) {
    auto out = open_out(path);
    out << "series,x,y\n";
    for (const auto& r : rows) out << r.series << ',' << r.x << ',' << r.y << '\n';
}

std::string fnv1a_file_hash(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a 64-bit offset basis
    char c;
    while (in.get(c)) {
        h ^= std::uint8_t(c);
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace wassmob
