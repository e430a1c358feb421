#include "impdiff/problemfile.hpp"

#include <fstream>
#include <sstream>

namespace impdiff {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_doubles(const std::string& text, std::size_t line_no) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw ParseError("problem file: bad number '" + token + "'", line_no);
        }
        if (used != token.size())
            throw ParseError("problem file: bad number '" + token + "'", line_no);
        out.push_back(v);
    }
    return out;
}

MultiIndex parse_multiindex(const std::string& text, std::size_t line_no) {
    std::vector<int> coords;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        try {
            coords.push_back(std::stoi(trim(token)));
        } catch (const std::exception&) {
            throw ParseError("problem file: bad multi-index '" + text + "'", line_no);
        }
    }
    if (coords.empty())
        throw ParseError("problem file: empty multi-index", line_no);
    return MultiIndex(std::move(coords));
}

} // namespace

ProblemFile parse_problem_file(std::istream& in) {
    ProblemFile file;
    file.dim = 0;
    bool saw_version = false;
    bool saw_y_mode = false;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::pair<int, std::vector<double>>> axes; // (axis, nodes)

    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos)
            throw ParseError("problem file: expected 'key: value'", line_no);
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));

        if (key == "version") {
            file.version = std::stoi(value);
            if (file.version != 1)
                throw ParseError("problem file: unsupported version " + value, line_no);
            saw_version = true;
        } else if (key == "q") {
            file.dim = std::stoi(value);
            if (file.dim < 1) throw ParseError("problem file: q must be >= 1", line_no);
        } else if (key == "g") {
            file.g_text = value;
        } else if (key == "n") {
            file.target = parse_multiindex(value, line_no);
        } else if (key.rfind("grid ", 0) == 0) {
            const std::string axis_name = trim(key.substr(5));
            if (axis_name.size() < 2 || axis_name[0] != 'x')
                throw ParseError("problem file: grid axis must be named x<j>", line_no);
            const int axis = std::stoi(axis_name.substr(1));
            if (file.dim == 0 || axis < 1 || axis > file.dim)
                throw ParseError("problem file: grid axis out of range (declare q first)", line_no);
            axes.push_back({axis - 1, parse_doubles(value, line_no)});
        } else if (key == "y") {
            if (value == "solve")
                file.solve = true;
            else if (value == "explicit")
                file.solve = false;
            else
                throw ParseError("problem file: y must be 'solve' or 'explicit'", line_no);
            saw_y_mode = true;
        } else if (key == "bracket") {
            const auto v = parse_doubles(value, line_no);
            if (v.size() != 2) throw ParseError("problem file: bracket needs two numbers", line_no);
            file.spec.bracket = {v[0], v[1]};
        } else if (key == "guess") {
            const auto v = parse_doubles(value, line_no);
            if (v.size() != 1) throw ParseError("problem file: guess needs one number", line_no);
            file.spec.guess = v[0];
        } else if (key.rfind("y ", 0) == 0) {
            if (file.dim == 0)
                throw ParseError("problem file: declare q before y values", line_no);
            const MultiIndex index = parse_multiindex(trim(key.substr(2)), line_no);
            if (index.dim() != file.dim)
                throw ParseError("problem file: y index dimension mismatch", line_no);
            const auto v = parse_doubles(value, line_no);
            if (v.size() != 1) throw ParseError("problem file: y value needs one number", line_no);
            file.y_values[index] = v[0];
        } else {
            throw ParseError("problem file: unknown key '" + key + "'", line_no);
        }
    }

    if (!saw_version) throw ParseError("problem file: missing 'version: 1'", line_no);
    if (file.dim == 0) throw ParseError("problem file: missing 'q'", line_no);
    if (file.g_text.empty()) throw ParseError("problem file: missing 'g'", line_no);
    if (!saw_y_mode) throw ParseError("problem file: missing 'y: solve' or 'y: explicit'", line_no);

    file.axes.assign(static_cast<std::size_t>(file.dim), {});
    for (auto& [axis, nodes] : axes) {
        if (!file.axes[static_cast<std::size_t>(axis)].empty())
            throw ParseError("problem file: duplicate grid axis x" + std::to_string(axis + 1), line_no);
        file.axes[static_cast<std::size_t>(axis)] = std::move(nodes);
    }
    for (int j = 0; j < file.dim; ++j)
        if (file.axes[static_cast<std::size_t>(j)].empty())
            throw ParseError("problem file: missing 'grid x" + std::to_string(j + 1) + "'", line_no);
    if (file.solve && !file.spec.bracket && !file.spec.guess)
        throw ParseError("problem file: solve mode needs a bracket or a guess", line_no);
    return file;
}

ProblemFile load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file: " + path, 0);
    return parse_problem_file(in);
}

ImplicitProblem build_problem(const ProblemFile& file) {
    auto provider = std::make_shared<ExprProvider>(Expr::parse(file.g_text, file.dim));
    Grid grid(file.axes);
    if (file.solve) {
        Tensor values = solve_y_on_grid(*provider, grid, file.spec);
        return ImplicitProblem(provider, std::move(grid), std::move(values));
    }
    std::vector<int> dims;
    for (int j = 0; j < grid.dim(); ++j) dims.push_back(grid.size(j));
    Tensor values(dims);
    const MultiIndex n = grid.max_order();
    std::vector<int> idx(static_cast<std::size_t>(grid.dim()), 0);
    while (true) {
        MultiIndex mi{std::vector<int>(idx)};
        auto it = file.y_values.find(mi);
        if (it == file.y_values.end())
            throw InvalidArgument("problem file: missing y value at grid index " + mi.to_string());
        values.at(mi) = it->second;
        int j = grid.dim() - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == n[j]) idx[static_cast<std::size_t>(j--)] = 0;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
    }
    return ImplicitProblem(provider, std::move(grid), std::move(values));
}

} // namespace impdiff
