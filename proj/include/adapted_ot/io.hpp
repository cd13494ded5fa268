#pragma once

// Text and JSON formats for coefficients, lattices, path measures and CSV output.
//
// Coefficient schema: comma-separated key=value pairs with a mandatory `kind`.
//   kind=constant,c=1.5
//   kind=affine,a=0,slope=2
//   kind=ou,theta=1
//   kind=table,knots=0;1;2,values=0;2;2
//   kind=sign-switch,level=5,switch=0.1
// A bare number is shorthand for a constant.

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "adapted_ot/model.hpp"

namespace aot::io {

using json = nlohmann::json;

CoefficientSpec parse_coefficient(const std::string& text, CoefficientRole role);
std::string format_coefficient(const CoefficientSpec& spec);

json lattice_to_json(const MarkovLattice& lattice);
MarkovLattice lattice_from_json(const json& j);

json path_measure_to_json(const DiscretePathMeasure& measure);
DiscretePathMeasure path_measure_from_json(const json& j);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

/// 17 significant digits with a '.' decimal point, independent of the global locale.
std::string format_double(double v);

/// Comma-separated file with a fixed header.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);

    /// Flushes and reports I/O errors.
    void close();

private:
    std::ofstream out_;
    std::string path_;
    std::size_t columns_;
};

}  // namespace aot::io
