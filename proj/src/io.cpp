#include "xkerr/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "xkerr/errors.hpp"

namespace xkerr::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_field(const std::string& s, std::size_t line_no, const char* column) {
    if (column == std::string_view("power_dbm") && s == "off")
        return -std::numeric_limits<double>::infinity();
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (s.empty() || end != begin + s.size() || errno == ERANGE) {
        std::ostringstream msg;
        msg << "line " << line_no << ": cannot parse " << column << " value '" << s << "'";
        throw InputError(msg.str());
    }
    return v;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv_row(std::ostream& out, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << format_number(values[i]);
    }
    out << '\n';
}

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line) != kDatasetHeader)
        throw InputError(std::string("dataset header must be '") + kDatasetHeader + "'");

    Dataset data;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(line);
        if (f.size() != 5 && f.size() != 4) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected 5 fields, found " << f.size();
            throw InputError(msg.str());
        }
        Record rec;
        rec.freq_hz = parse_field(f[0], line_no, "freq_hz");
        rec.control_dbm = parse_field(f[1], line_no, "power_dbm");
        rec.t = {parse_field(f[2], line_no, "t_re"), parse_field(f[3], line_no, "t_im")};
        rec.weight = (f.size() == 5 && !f[4].empty()) ? parse_field(f[4], line_no, "weight") : 1.0;
        data.records.push_back(rec);
    }
    return data;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    out << kDatasetHeader << '\n';
    for (const Record& r : data.records)
        write_csv_row(out, {r.freq_hz, r.control_dbm, r.t.real(), r.t.imag(), r.weight});
}

}  // namespace xkerr::io
