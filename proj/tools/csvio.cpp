#include "csvio.hpp"

#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace bdcli {

namespace {

int days_in_month(int year, int month) {
    static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return days[month - 1];
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_value(const std::string& text, std::size_t line_no) {
    const std::string t = strip(text);
    double v;
    const auto* begin = t.data();
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw CsvError("line " + std::to_string(line_no) + ": cannot parse number '" + t + "'");
    return v;
}

std::int64_t parse_index(const std::string& text, std::size_t line_no) {
    const std::string t = strip(text);
    std::int64_t v;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw CsvError("line " + std::to_string(line_no) + ": cannot parse index '" + t + "'");
    return v;
}

}  // namespace

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

Date parse_date(const std::string& text) {
    const std::string t = strip(text);
    Date d;
    int n = 0;
    if (std::sscanf(t.c_str(), "%4d-%2d-%2d%n", &d.year, &d.month, &d.day, &n) != 3 ||
        n != static_cast<int>(t.size()) || t.size() != 10)
        throw CsvError("not an ISO-8601 date: '" + t + "'");
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        throw CsvError("calendar date out of range: '" + t + "'");
    return d;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", date.year, date.month, date.day);
    return buf;
}

Date next_day(const Date& date) {
    Date d = date;
    if (++d.day > days_in_month(d.year, d.month)) {
        d.day = 1;
        if (++d.month > 12) {
            d.month = 1;
            ++d.year;
        }
    }
    return d;
}

Table read_table(std::istream& in) {
    Table table;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    int columns = 0;
    std::int64_t expected_index = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        if (trimmed[0] == '#') {
            std::uint64_t s;
            if (std::sscanf(trimmed.c_str(), "# seed: %" SCNu64, &s) == 1) {
                table.has_seed = true;
                table.seed = s;
            }
            continue;
        }
        if (!header_seen) {
            const auto fields = split_fields(trimmed);
            std::string h0 = fields.empty() ? "" : strip(fields[0]);
            std::string h1 = fields.size() > 1 ? strip(fields[1]) : "";
            std::string h2 = fields.size() > 2 ? strip(fields[2]) : "";
            if (fields.size() == 2 && h0 == "date" && h1 == "value") {
                table.dated = true;
                columns = 2;
            } else if (fields.size() == 2 && h0 == "t" && h1 == "value") {
                columns = 2;
            } else if (fields.size() == 3 && h0 == "t" && h1 == "y" && h2 == "sigma") {
                columns = 3;
            } else {
                throw CsvError("unrecognized header '" + trimmed +
                               "'; expected date,value or t,value or t,y,sigma");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != columns)
            throw CsvError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(columns) + " fields, got " +
                           std::to_string(fields.size()));
        if (table.dated) {
            Date d;
            try {
                d = parse_date(fields[0]);
            } catch (const CsvError& e) {
                throw CsvError("line " + std::to_string(line_no) + ": " + e.what());
            }
            if (!table.dates.empty() && !(table.dates.back() < d))
                throw CsvError("line " + std::to_string(line_no) +
                               ": dates must be strictly increasing (" + format_date(d) + ")");
            table.dates.push_back(d);
            table.values.push_back(parse_value(fields[1], line_no));
        } else {
            const std::int64_t t = parse_index(fields[0], line_no);
            if (t != expected_index)
                throw CsvError("line " + std::to_string(line_no) + ": expected index " +
                               std::to_string(expected_index) + ", got " + std::to_string(t));
            ++expected_index;
            table.values.push_back(parse_value(fields[1], line_no));
            if (columns == 3) table.sigma.push_back(parse_value(fields[2], line_no));
        }
    }
    if (!header_seen) throw CsvError("input is empty or has no header");
    if (table.values.empty()) throw CsvError("input has a header but no data rows");
    return table;
}

Table read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open '" + path + "'");
    return read_table(in);
}

YearSlice slice_year(const Table& table, int year) {
    if (!table.dated) throw CsvError("year slicing requires a dated input table");
    YearSlice slice;
    slice.leap = is_leap_year(year);

    const Date first{year, 1, 1};
    const Date last{year, 12, 31};
    std::size_t i = 0;
    while (i < table.dates.size() && table.dates[i] < first) ++i;

    std::vector<std::string> missing;
    for (Date d = first; !(last < d); d = next_day(d)) {
        if (i < table.dates.size() && table.dates[i] == d) {
            slice.values.push_back(table.values[i]);
            ++i;
        } else {
            missing.push_back(format_date(d));
        }
    }
    if (!missing.empty()) {
        std::string msg = "missing dates in " + std::to_string(year) + ":";
        for (const auto& m : missing) msg += " " + m;
        throw CsvError(msg);
    }
    return slice;
}

void write_simulation_csv(std::ostream& out, const std::vector<double>& y,
                          const std::vector<double>& sigma, std::uint64_t seed) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# seed: %llu\n", static_cast<unsigned long long>(seed));
    out << buf << "t,y,sigma\n";
    for (std::size_t t = 0; t < y.size(); ++t) {
        char ybuf[40], sbuf[40];
        std::snprintf(ybuf, sizeof(ybuf), "%.17g", y[t]);
        // row t = 0 holds the initial value, which has no shock
        if (t == 0)
            std::snprintf(sbuf, sizeof(sbuf), "0");
        else
            std::snprintf(sbuf, sizeof(sbuf), "%.17g", sigma[t - 1]);
        out << t << ',' << ybuf << ',' << sbuf << '\n';
    }
}

}  // namespace bdcli
