#include "cli_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_real(const std::string& key, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
}

long long parse_integer(const std::string& key, const std::string& text)
{
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
}

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

Config::Config(std::vector<KeySpec> keys) : keys_(std::move(keys))
{
    for (const auto& k : keys_) values_[k.key] = k.default_value;
}

bool Config::known(const std::string& key) const
{
    return std::any_of(keys_.begin(), keys_.end(), [&](const KeySpec& k) { return k.key == key; });
}

const KeySpec& Config::spec(const std::string& key) const
{
    for (const auto& k : keys_)
        if (k.key == key) return k;
    throw ConfigError("unknown key '" + key + "'");
}

void Config::set(const std::string& key, const std::string& value)
{
    spec(key);
    values_[key] = value;
}

void Config::load_text(const std::string& text, const std::string& origin)
{
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            const bool exists =
                std::any_of(keys_.begin(), keys_.end(), [&](const KeySpec& k) { return k.section == section; });
            if (!exists) throw ConfigError(where + ": unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!known(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        if (!section.empty() && spec(key).section != section)
            throw ConfigError(where + ": key '" + key + "' belongs in section [" + spec(key).section + "]");
        values_[key] = trim(line.substr(eq + 1));
    }
}

void Config::load_file(const std::string& path)
{
    const std::string text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
        load_text(text, path);
        return;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) throw ConfigError(path + ": manifest has no config object");
    for (const auto& [section, entries] : j["config"].items()) {
        if (!entries.is_object()) throw ConfigError(path + ": config section '" + section + "' is not an object");
        for (const auto& [key, value] : entries.items()) {
            if (!known(key)) throw ConfigError(path + ": unknown key '" + key + "'");
            if (spec(key).section != section)
                throw ConfigError(path + ": key '" + key + "' belongs in section [" + spec(key).section + "]");
            values_[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
}

std::string Config::str(const std::string& key) const
{
    spec(key);
    return values_.at(key);
}

double Config::real(const std::string& key) const { return parse_real(key, str(key)); }

long long Config::integer(const std::string& key) const { return parse_integer(key, str(key)); }

bool Config::flag(const std::string& key) const
{
    const auto v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no" || v.empty()) return false;
    throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<double> Config::reals(const std::string& key) const
{
    std::vector<double> out;
    const auto v = str(key);
    if (v.empty()) return out;
    for (const auto& item : split(v, ',')) out.push_back(parse_real(key, item));
    return out;
}

std::vector<long long> Config::integers(const std::string& key) const
{
    std::vector<long long> out;
    const auto v = str(key);
    if (v.empty()) return out;
    for (const auto& item : split(v, ',')) out.push_back(parse_integer(key, item));
    return out;
}

std::string Config::to_text() const
{
    std::string out, section;
    for (const auto& k : keys_) {
        if (k.section != section) {
            section = k.section;
            out += (out.empty() ? "[" : "\n[") + section + "]\n";
        }
        out += k.key + " = " + values_.at(k.key) + "\n";
    }
    return out;
}

std::string Config::to_json() const
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& k : keys_) j[k.section][k.key] = values_.at(k.key);
    return j.dump();
}

std::string format_real(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt("%.17g", v);
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns)
{
    if (header.size() != columns.size()) throw RuntimeError("csv: header and column counts differ");
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += '\n';
    const std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (const auto& col : columns)
        if (col.size() != rows) throw RuntimeError("csv: columns differ in length");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + format_real(columns[c][r]);
        out += '\n';
    }
    return out;
}

const std::vector<double>& CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns[i];
    throw RuntimeError("csv: no column '" + name + "'");
}

CsvTable read_csv(const std::string& path)
{
    std::istringstream in(read_file(path));
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw RuntimeError(path + ": empty CSV");
    t.header = split(trim(line), ',');
    t.columns.resize(t.header.size());
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != t.header.size())
            throw RuntimeError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                               " fields");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            try {
                std::size_t used = 0;
                t.columns[c].push_back(std::stod(cells[c], &used));
                if (used != cells[c].size()) throw std::invalid_argument("trailing text");
            } catch (const std::exception&) {
                throw RuntimeError(path + ":" + std::to_string(lineno) + ": '" + cells[c] + "' is not a number");
            }
        }
    }
    return t;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeError("cannot write " + path);
    out << content;
    if (!out) throw RuntimeError("write failed: " + path);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RuntimeError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<double> nice_ticks(double lo, double hi, int target)
{
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / std::max(target, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    return ticks;
}

std::string svg_scatter(const std::vector<std::pair<double, double>>& points, const SvgStyle& style)
{
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : points)
        if (std::isfinite(p.first) && std::isfinite(p.second)) pts.push_back(p);
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (!pts.empty()) {
        x0 = x1 = pts[0].first;
        y0 = y1 = pts[0].second;
        for (const auto& [x, y] : pts) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (style.diagonal) {
        x0 = y0 = std::min(x0, y0);
        x1 = y1 = std::max(x1, y1);
    }
    auto pad = [](double& lo, double& hi) {
        const double span = hi - lo;
        const double p = span > 0.0 ? 0.05 * span : std::max(1.0, std::abs(lo));
        lo -= p;
        hi += p;
    };
    pad(x0, x1);
    pad(y0, y1);

    const double left = 70.0, right = 20.0, top = 40.0, bottom = 55.0;
    const double pw = style.width - left - right, ph = style.height - top - bottom;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };
    auto esc = [](const std::string& s) {
        std::string o;
        for (char c : s) {
            if (c == '<') o += "&lt;";
            else if (c == '>') o += "&gt;";
            else if (c == '&') o += "&amp;";
            else o += c;
        }
        return o;
    };
    auto n2 = [](double v) { return fmt("%.2f", v); };
    auto label = [](double v) { return fmt("%.6g", v); };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) + "\" height=\"" +
         std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
         std::to_string(style.height) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(style.width) + "\" height=\"" + std::to_string(style.height) +
         "\" fill=\"white\"/>\n";
    s += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
    s += "<line x1=\"" + n2(left) + "\" y1=\"" + n2(top + ph) + "\" x2=\"" + n2(left + pw) + "\" y2=\"" + n2(top + ph) +
         "\"/>\n";
    s += "<line x1=\"" + n2(left) + "\" y1=\"" + n2(top) + "\" x2=\"" + n2(left) + "\" y2=\"" + n2(top + ph) + "\"/>\n";
    s += "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double t : nice_ticks(x0, x1, 6)) {
        const double px = sx(t);
        s += "<line x1=\"" + n2(px) + "\" y1=\"" + n2(top + ph) + "\" x2=\"" + n2(px) + "\" y2=\"" + n2(top + ph + 5) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + n2(px) + "\" y=\"" + n2(top + ph + 18) + "\" text-anchor=\"middle\">" + label(t) +
             "</text>\n";
    }
    for (double t : nice_ticks(y0, y1, 6)) {
        const double py = sy(t);
        s += "<line x1=\"" + n2(left - 5) + "\" y1=\"" + n2(py) + "\" x2=\"" + n2(left) + "\" y2=\"" + n2(py) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + n2(left - 8) + "\" y=\"" + n2(py + 4) + "\" text-anchor=\"end\">" + label(t) + "</text>\n";
    }
    s += "</g>\n";
    s += "<text x=\"" + n2(left + pw / 2) + "\" y=\"" + n2(style.height - 12.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + esc(style.x_label) + "</text>\n";
    s += "<text x=\"16\" y=\"" + n2(top + ph / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 " + n2(top + ph / 2) + ")\">" + esc(style.y_label) + "</text>\n";
    s += "<text x=\"" + n2(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + esc(style.title) + "</text>\n";
    if (style.diagonal) {
        const double lo = std::max(x0, y0), hi = std::min(x1, y1);
        s += "<line class=\"reference\" x1=\"" + n2(sx(lo)) + "\" y1=\"" + n2(sy(lo)) + "\" x2=\"" + n2(sx(hi)) +
             "\" y2=\"" + n2(sy(hi)) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    }
    if (style.connect && !pts.empty()) {
        s += "<polyline class=\"series\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            s += (i ? " " : "") + n2(sx(pts[i].first)) + "," + n2(sy(pts[i].second));
        s += "\"/>\n";
    } else {
        s += "<g class=\"points\" fill=\"steelblue\" fill-opacity=\"0.6\">\n";
        for (const auto& [x, y] : pts) s += "<circle cx=\"" + n2(sx(x)) + "\" cy=\"" + n2(sy(y)) + "\" r=\"2\"/>\n";
        s += "</g>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace cli
