#include "adapted_ot/io.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include "adapted_ot/errors.hpp"

namespace aot::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double parse_number(const std::string& text, const std::string& key) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw ConfigError("coefficient field '" + key + "' is not a number: '" + text + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find(';', start);
        out.push_back(parse_number(text.substr(start, end - start), key));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
    return s;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc()) throw InternalError("cannot format a double");
    return std::string(buf, ptr);
}

CoefficientSpec parse_coefficient(const std::string& text, CoefficientRole role) {
    if (text.find('=') == std::string::npos) {
        return CoefficientSpec::constant(parse_number(text, "c"), role);
    }
    std::map<std::string, std::string> fields;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("coefficient field without '=': '" + item + "'");
        const std::string key = item.substr(0, eq);
        if (!fields.emplace(key, item.substr(eq + 1)).second) {
            throw ConfigError("duplicate coefficient field '" + key + "'");
        }
    }
    auto take = [&](const std::string& key) {
        auto it = fields.find(key);
        if (it == fields.end()) throw ConfigError("coefficient is missing field '" + key + "'");
        std::string v = it->second;
        fields.erase(it);
        return v;
    };
    const std::string kind = take("kind");
    CoefficientSpec spec;
    if (kind == "constant") {
        spec = CoefficientSpec::constant(parse_number(take("c"), "c"), role);
    } else if (kind == "affine") {
        const double a = parse_number(take("a"), "a");
        spec = CoefficientSpec::affine(a, parse_number(take("slope"), "slope"), role);
    } else if (kind == "ou") {
        if (role != CoefficientRole::drift) throw ConfigError("ou is a drift kind");
        spec = CoefficientSpec::ou(parse_number(take("theta"), "theta"));
    } else if (kind == "table") {
        auto knots = parse_list(take("knots"), "knots");
        spec = CoefficientSpec::table(std::move(knots), parse_list(take("values"), "values"), role);
    } else if (kind == "sign-switch") {
        if (role != CoefficientRole::drift) throw ConfigError("sign-switch is a drift kind");
        const double level = parse_number(take("level"), "level");
        spec = CoefficientSpec::sign_switch(level, parse_number(take("switch"), "switch"));
    } else {
        throw ConfigError("unknown coefficient kind '" + kind + "'");
    }
    if (!fields.empty()) throw ConfigError("unknown coefficient field '" + fields.begin()->first + "'");
    return spec;
}

std::string format_coefficient(const CoefficientSpec& spec) {
    return std::visit(
        overloaded{
            [](const ConstantCoef& c) { return "kind=constant,c=" + format_double(c.c); },
            [](const AffineCoef& a) {
                return "kind=affine,a=" + format_double(a.a) + ",slope=" + format_double(a.slope);
            },
            [](const OUCoef& o) { return "kind=ou,theta=" + format_double(o.theta); },
            [](const TableCoef& t) { return "kind=table,knots=" + join(t.knots) + ",values=" + join(t.values); },
            [](const SignSwitchCoef& s) {
                return "kind=sign-switch,level=" + format_double(s.level) + ",switch=" + format_double(s.switch_time);
            },
        },
        spec.kind());
}

json lattice_to_json(const MarkovLattice& lattice) {
    json j;
    j["x0"] = lattice.x0;
    j["stages"] = json::array();
    for (const auto& st : lattice.stages) {
        j["stages"].push_back({{"support", st.support}, {"transitions", st.transitions}});
    }
    return j;
}

MarkovLattice lattice_from_json(const json& j) {
    try {
        MarkovLattice lattice;
        lattice.x0 = j.at("x0").get<double>();
        for (const auto& st : j.at("stages")) {
            LatticeStage stage;
            stage.support = st.at("support").get<std::vector<double>>();
            stage.transitions = st.at("transitions").get<std::vector<std::vector<double>>>();
            lattice.stages.push_back(std::move(stage));
        }
        lattice.validate();
        return lattice;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed lattice JSON: ") + e.what());
    }
}

json path_measure_to_json(const DiscretePathMeasure& measure) {
    return {{"x0", measure.x0}, {"paths", measure.paths}, {"weights", measure.weights}};
}

DiscretePathMeasure path_measure_from_json(const json& j) {
    try {
        DiscretePathMeasure m;
        m.x0 = j.value("x0", 0.0);
        m.paths = j.at("paths").get<std::vector<std::vector<double>>>();
        m.weights = j.at("weights").get<std::vector<double>>();
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed path-measure JSON: ") + e.what());
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("write to '" + path + "' failed");
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), path_(path), columns_(header.size()) {
    if (!out_) throw ConfigError("cannot write '" + path + "'");
    out_.imbue(std::locale::classic());
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw InternalError("CSV row has the wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw ConfigError("write to '" + path_ + "' failed");
    out_.close();
}

}  // namespace aot::io
