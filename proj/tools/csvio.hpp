#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdcli {

class CsvError : public std::runtime_error {
  public:
    explicit CsvError(const std::string& what) : std::runtime_error(what) {}
};

struct Date {
    int year = 0, month = 0, day = 0;

    friend bool operator==(const Date& a, const Date& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day;
    }
    friend bool operator<(const Date& a, const Date& b) {
        if (a.year != b.year) return a.year < b.year;
        if (a.month != b.month) return a.month < b.month;
        return a.day < b.day;
    }
};

// Strict ISO-8601 calendar date (YYYY-MM-DD); throws CsvError on anything else.
Date parse_date(const std::string& text);
std::string format_date(const Date& date);
bool is_leap_year(int year);
Date next_day(const Date& date);

// A parsed input table. Dated tables keep the calendar dates alongside the
// values; synthetic tables are indexed 0..T and may carry a sigma column.
struct Table {
    bool dated = false;
    std::vector<Date> dates;    // when dated, parallel to values
    std::vector<double> values;
    std::vector<double> sigma;  // empty unless the input had a sigma column
    bool has_seed = false;
    std::uint64_t seed = 0;     // from an optional "# seed: N" comment line
};

// Accepts headers "date,value", "t,value" and "t,y,sigma". Lines starting
// with '#' are comments; "# seed: N" is recorded. Dated tables must have
// strictly increasing dates; synthetic tables must be indexed 0,1,2,...
Table read_table(std::istream& in);
Table read_table_file(const std::string& path);

struct YearSlice {
    std::vector<double> values;  // one value per calendar day, Jan 1 .. Dec 31
    bool leap = false;
};

// Throws CsvError naming every missing date in the year.
YearSlice slice_year(const Table& table, int year);

// Writes the "t,y,sigma" format produced by the simulate command. y is
// written at full precision so a read-back is bit-exact.
void write_simulation_csv(std::ostream& out, const std::vector<double>& y,
                          const std::vector<double>& sigma, std::uint64_t seed);

}  // namespace bdcli
