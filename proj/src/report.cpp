#include "roughhodge/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "roughhodge/errors.hpp"

namespace rhodge {

using nlohmann::json;

namespace {

std::string number_text(double v)
{
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::string csv_cell(const json& v)
{
    if (v.is_number_float())
        return number_text(v.get<double>());
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"')
                quoted += '"';
            quoted += c;
        }
        return quoted + "\"";
    }
    return v.dump();
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, const json*>>& out)
{
    if (v.is_object()) {
        for (const auto& item : v.items())
            flatten(item.value(), prefix.empty() ? item.key() : prefix + "." + item.key(), out);
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i)
            flatten(v[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        out.emplace_back(prefix, &v);
    }
}

void write_file(const std::filesystem::path& path, const std::string& text, EmitResult& result)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << text;
    if (!out)
        throw Error(ErrorKind::IoError, "write failed for " + path.string());
    result.written.push_back(path.string());
}

struct Frame {
    double x0, x1, y0, y1;
    static constexpr double width = 480, height = 320, margin = 48;

    double px(double x) const { return margin + (x - x0) / std::max(x1 - x0, 1e-300) * (width - 2 * margin); }
    double py(double y) const
    {
        return height - margin - (y - y0) / std::max(y1 - y0, 1e-300) * (height - 2 * margin);
    }
};

Frame padded(double x0, double x1, double y0, double y1)
{
    auto pad = [](double& lo, double& hi) {
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double d = 0.05 * (hi - lo);
        lo -= d;
        hi += d;
    };
    pad(x0, x1);
    pad(y0, y1);
    return {x0, x1, y0, y1};
}

std::string svg_header(const std::string& title, const std::string& xlabel, const std::string& ylabel, const Frame& f)
{
    std::ostringstream s;
    s << std::setprecision(6);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::width << "\" height=\"" << Frame::height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << Frame::width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << title
      << "</text>\n";
    s << "<rect x=\"" << Frame::margin << "\" y=\"" << Frame::margin << "\" width=\""
      << Frame::width - 2 * Frame::margin << "\" height=\"" << Frame::height - 2 * Frame::margin
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    s << "<text x=\"" << Frame::width / 2 << "\" y=\"" << Frame::height - 12 << "\" text-anchor=\"middle\">"
      << xlabel << "</text>\n";
    s << "<text x=\"14\" y=\"" << Frame::height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << Frame::height / 2 << ")\">" << ylabel << "</text>\n";
    s << "<text x=\"" << Frame::margin << "\" y=\"" << Frame::height - Frame::margin + 14 << "\">" << f.x0
      << "</text>\n";
    s << "<text x=\"" << Frame::width - Frame::margin << "\" y=\"" << Frame::height - Frame::margin + 14
      << "\" text-anchor=\"end\">" << f.x1 << "</text>\n";
    s << "<text x=\"" << Frame::margin - 4 << "\" y=\"" << Frame::height - Frame::margin
      << "\" text-anchor=\"end\">" << f.y0 << "</text>\n";
    s << "<text x=\"" << Frame::margin - 4 << "\" y=\"" << Frame::margin + 8 << "\" text-anchor=\"end\">" << f.y1
      << "</text>\n";
    return s.str();
}

}  // namespace

std::string canonical_json(const json& value)
{
    return value.dump(2) + "\n";
}

json to_json(const RefineResult& result)
{
    json levels = json::array();
    for (const RefineLevel& l : result.levels)
        levels.push_back({{"level", l.level}, {"N", l.n}, {"r", l.r}, {"slope", l.slope}});
    return {{"model", to_string(result.config.model)},
            {"form", to_string(result.config.form)},
            {"base", result.config.base},
            {"terms", result.config.weierstrass_terms},
            {"levels", levels},
            {"strictly_increasing", result.strictly_increasing},
            {"final_ratio", result.final_ratio},
            {"stabilized", result.stabilized}};
}

std::string report_csv(const json& report)
{
    std::ostringstream out;
    out << "task,key,value\n";
    if (!report.contains("tasks"))
        return out.str();
    for (const json& task : report["tasks"]) {
        std::vector<std::pair<std::string, const json*>> rows;
        if (task.contains("results"))
            flatten(task["results"], "", rows);
        rows.emplace_back("passed", &task["passed"]);
        for (const auto& [key, value] : rows)
            out << csv_cell(task["type"]) << "," << csv_cell(json(key)) << "," << csv_cell(*value) << "\n";
    }
    return out.str();
}

std::string refine_csv(const json& refine)
{
    std::ostringstream out;
    out << "level,N,r,slope\n";
    for (const json& l : refine["levels"])
        out << l["level"].get<int>() << "," << l["N"].get<long long>() << "," << number_text(l["r"].get<double>())
            << "," << number_text(l["slope"].get<double>()) << "\n";
    return out.str();
}

std::string spectrum_svg(const json& report)
{
    std::vector<std::vector<double>> series;
    if (report.contains("tasks"))
        for (const json& task : report["tasks"])
            if (task.contains("results") && task["results"].contains("spectrum"))
                series.push_back(task["results"]["spectrum"].get<std::vector<double>>());
    if (series.empty())
        return {};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t count = 1;
    for (const auto& s : series) {
        for (double v : s) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        count = std::max(count, s.size());
    }
    if (!std::isfinite(lo))
        return {};
    const Frame f = padded(0, static_cast<double>(count - 1), lo, hi);
    std::ostringstream s;
    s << svg_header("Hodge-Dirac spectrum", "eigenvalue index", "eigenvalue", f) << std::setprecision(6);
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    for (std::size_t k = 0; k < series.size(); ++k)
        for (std::size_t i = 0; i < series[k].size(); ++i)
            s << "<circle cx=\"" << f.px(static_cast<double>(i)) << "\" cy=\"" << f.py(series[k][i])
              << "\" r=\"2.5\" fill=\"" << colors[k % 4] << "\"/>\n";
    s << "</svg>\n";
    return s.str();
}

std::string refine_svg(const json& report)
{
    if (!report.contains("tasks"))
        return {};
    const json* refine = nullptr;
    for (const json& task : report["tasks"])
        if (task["type"] == "refine_divergence" && task.contains("results"))
            refine = &task["results"];
    if (!refine || (*refine)["levels"].empty())
        return {};
    std::vector<std::pair<double, double>> pts;
    for (const json& l : (*refine)["levels"]) {
        const double r = l["r"].get<double>();
        if (r > 0)
            pts.emplace_back(std::log2(static_cast<double>(l["N"].get<long long>())), std::log2(r));
    }
    if (pts.empty())
        return {};
    double x0 = pts.front().first, x1 = x0, y0 = pts.front().second, y1 = y0;
    for (const auto& [x, y] : pts) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    const Frame f = padded(x0, x1, y0, y1);
    std::ostringstream s;
    s << svg_header("codifferential ratio, model " + (*refine)["model"].get<std::string>(), "log2 N", "log2 r", f)
      << std::setprecision(6);
    s << "<polyline fill=\"none\" stroke=\"#1f77b4\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
        s << (i ? " " : "") << f.px(pts[i].first) << "," << f.py(pts[i].second);
    s << "\"/>\n";
    for (const auto& [x, y] : pts)
        s << "<circle cx=\"" << f.px(x) << "\" cy=\"" << f.py(y) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    s << "</svg>\n";
    return s.str();
}

EmitResult emit_report(const json& report, const EmitOptions& options)
{
    EmitResult result;
    const std::filesystem::path dir(options.dir.empty() ? "." : options.dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorKind::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());
    write_file(dir / (options.stem + ".json"), canonical_json(report), result);
    const json* refine = nullptr;
    if (report.contains("tasks"))
        for (const json& task : report["tasks"])
            if (task["type"] == "refine_divergence" && task.contains("results"))
                refine = &task["results"];
    if (options.csv) {
        write_file(dir / (options.stem + ".csv"), report_csv(report), result);
        if (refine)
            write_file(dir / (options.stem + "_refine.csv"), refine_csv(*refine), result);
    }
    if (options.svg) {
        const std::string spectrum = spectrum_svg(report);
        const std::string refinement = refine_svg(report);
        if (!spectrum.empty())
            write_file(dir / (options.stem + "_spectrum.svg"), spectrum, result);
        if (!refinement.empty())
            write_file(dir / (options.stem + "_refine.svg"), refinement, result);
        if (spectrum.empty() && refinement.empty())
            result.notices.push_back("SVG omitted: the report has no spectrum or refinement data to plot");
    }
    return result;
}

}  // namespace rhodge
