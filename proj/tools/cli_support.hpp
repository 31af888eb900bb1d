#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cli {

/// Config problems; the CLI maps these to exit status 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runtime problems outside the library (I/O, malformed data); exit status 1.
struct RuntimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KeySpec {
    std::string section;
    std::string key;
    std::string default_value;
    std::string help;
};

/// Resolved key=value settings over a fixed set of known keys.
class Config {
public:
    explicit Config(std::vector<KeySpec> keys);

    const std::vector<KeySpec>& keys() const { return keys_; }
    bool known(const std::string& key) const;

    /// Sets a value; unknown keys are rejected with the key named.
    void set(const std::string& key, const std::string& value);

    /// Reads flat "key = value" text with optional [section] headers. '#' starts a comment.
    /// A key must sit in its own section when one is open.
    void load_text(const std::string& text, const std::string& origin);
    /// Reads a config file, or the "config" object of a manifest JSON.
    void load_file(const std::string& path);

    std::string str(const std::string& key) const;
    double real(const std::string& key) const;
    long long integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<long long> integers(const std::string& key) const;

    /// Section-grouped text that load_text accepts back.
    std::string to_text() const;
    /// {section: {key: value}} with every value a string.
    std::string to_json() const;

private:
    const KeySpec& spec(const std::string& key) const;
    std::vector<KeySpec> keys_;
    std::map<std::string, std::string> values_;
};

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_real(double v);

/// CSV with '\n' line endings and a header row.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
    const std::vector<double>& column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct SvgStyle {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 640;
    int height = 480;
    bool diagonal = false;  ///< draw y = x (Q-Q plots)
    bool connect = false;   ///< polyline through the points instead of markers
};

/// Self-contained scatter plot; identical input gives identical bytes. Non-finite points are skipped.
std::string svg_scatter(const std::vector<std::pair<double, double>>& points, const SvgStyle& style);

/// Tick positions covering [lo, hi] at a 1-2-5 step.
std::vector<double> nice_ticks(double lo, double hi, int target);

}  // namespace cli
