#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qal/config.hpp"
#include "qal/error.hpp"

using namespace qal;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("qal-unit-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string config_error_key(std::string_view text, const std::vector<Override>& overrides = {}) {
    try {
        (void)parse_config(text, overrides);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<none>";
}

RunConfig config_for(const fs::path& dir, const std::vector<Override>& extra) {
    std::vector<Override> o{{"out_dir", dir.string()}};
    o.insert(o.end(), extra.begin(), extra.end());
    return parse_config("", o);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty configuration gives the reference defaults") {
    const auto c = parse_config("");
    CHECK(c.model.half_width == 30.0);
    CHECK(c.model.dx == 0.04);
    CHECK(c.model.dt == 0.001);
    CHECK(c.model.S == 300);
    CHECK(c.model.energy_tol == 1e-10);
    CHECK(c.frag_threshold == 0.4);
    CHECK(c.seed == 42);
}

TEST_CASE("flags override the file") {
    const auto c = parse_config("# comment\ng5=1.0\n  V0 = 2.5 \n", {{"g5", "3.0"}});
    CHECK(c.model.g5 == 3.0);
    CHECK(c.model.V0 == 2.5);
}

TEST_CASE("bad values name their key") {
    CHECK(config_error_key("S=0") == "S");
    CHECK(config_error_key("colour=blue") == "colour");
    CHECK(config_error_key("dt=fast") == "dt");
    CHECK(config_error_key("dt=-1") == "dt");
    CHECK(config_error_key("", {{"g5", "1e"}}) == "g5");
    CHECK(config_error_key("f_lo=0.6") == "f_lo");
    CHECK(config_error_key("sweep_var=T") == "sweep_var");
    CHECK(config_error_key("sweep_var=g5\nsweep_values=1,0.5") == "sweep_values");
    CHECK(config_error_key("seed=-3") == "seed");
}

TEST_CASE("value lists") {
    CHECK(parse_value_list("k", "0,1,3") == std::vector<double>{0.0, 1.0, 3.0});
    const auto r = parse_value_list("k", "0:3:0.1");
    REQUIRE(r.size() == 31);
    CHECK(r[3] == 0.3);
    CHECK(r[12] == 1.2);
    CHECK(r.back() == 3.0);
    CHECK(parse_value_list("k", "50:400:50").size() == 8);
    CHECK_THROWS_AS(parse_value_list("k", "1:2"), ConfigError);
    CHECK_THROWS_AS(parse_value_list("k", "1,,2"), ConfigError);
}

TEST_CASE("describe round-trips through parse_config") {
    const auto c = parse_config("g5=1.25\nV0=5\nseed=7\nsweep_var=S\nsweep_values=50:400:50\nn_seeds=8\n");
    std::string text;
    for (const auto& kv : c.describe()) text += kv + '\n';
    const auto again = parse_config(text);
    CHECK(again.describe() == c.describe());
    CHECK(c.describe().size() == config_keys().size());
}

TEST_CASE("commands") {
    CHECK(parse_command("sweep") == Command::sweep);
    CHECK_FALSE(parse_command("plot").has_value());
}

TEST_CASE("ground on an empty box") {
    const auto dir = scratch_dir("box");
    std::ostringstream out, err;
    REQUIRE(dispatch(Command::ground, config_for(dir, {{"V0", "0"}}), out, err) == 0);
    const WaveFunction psi = read_dump_file((dir / "ground.dump").string());
    const std::vector<double> zero(psi.size(), 0.0);
    const double e = energy_functionals(psi, zero, 0.0).energy;
    CHECK(std::abs(e - 1.3708e-3) / 1.3708e-3 < 5e-3);
    const auto dump = slurp(dir / "ground.dump");
    CHECK(dump.rfind("# qal ground\n# L=30\n", 0) == 0);
    CHECK(dump.find("# V0=0\n") != std::string::npos);
}

TEST_CASE("ground -> fit round trip keeps full precision") {
    const auto dir = scratch_dir("roundtrip");
    std::ostringstream out, err;
    const auto cfg = config_for(dir, {{"L", "10"}, {"V0", "5"}, {"S", "100"}, {"g5", "1"}});
    REQUIRE(dispatch(Command::ground, cfg, out, err) == 0);

    const auto csv = lines_of(slurp(dir / "ground.csv"));
    REQUIRE(csv.size() >= 2);
    CHECK(csv[0] == "# qal ground");
    const auto header = split(csv[csv.size() - 2]);
    const auto row = split(csv.back());
    REQUIRE(header.size() == row.size());
    auto column = [&](const std::string& name) {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return row[k];
        FAIL("missing column " << name);
        return std::string();
    };

    const WaveFunction psi = read_dump_file((dir / "ground.dump").string());
    const auto d = diagnostics(psi);
    CHECK(std::abs(d.delta_x - std::stod(column("delta_x"))) < 1e-12);
    CHECK(std::abs(d.mean_x - std::stod(column("mean_x"))) < 1e-12);
    CHECK(std::abs(d.peak_height - std::stod(column("peak_height"))) < 1e-12);

    std::ostringstream fit_out;
    auto fit_cfg = cfg;
    fit_cfg.input = (dir / "ground.dump").string();
    REQUIRE(dispatch(Command::fit, fit_cfg, fit_out, err) == 0);
    const auto fit_lines = lines_of(fit_out.str());
    REQUIRE(fit_lines.size() == 2);
    CHECK(fit_lines[0] == "l_left,l_right,r2_exp_left,r2_exp_right,sigma_gauss,r2_gauss,delta_x,localized,regime");
    const auto fit = split(fit_lines[1]);
    REQUIRE(fit.size() == 9);
    CHECK(std::abs(std::stod(fit[0]) - std::stod(column("l_left"))) < 1e-12);
    CHECK(std::abs(std::stod(fit[1]) - std::stod(column("l_right"))) < 1e-12);
    CHECK(fit[8] == column("regime"));
}

TEST_CASE("potential output is deterministic") {
    const auto a = scratch_dir("pot-a");
    const auto b = scratch_dir("pot-b");
    std::ostringstream out, err;
    REQUIRE(dispatch(Command::potential, config_for(a, {{"V0", "1"}, {"seed", "7"}}), out, err) == 0);
    REQUIRE(dispatch(Command::potential, config_for(b, {{"V0", "1"}, {"seed", "7"}}), out, err) == 0);
    const auto text_a = slurp(a / "potential.txt");
    const auto text_b = slurp(b / "potential.txt");
    // Headers name the output directory; compare the data lines.
    auto data = [](const std::string& t) { return t.substr(t.find("# x V\n")); };
    CHECK(data(text_a) == data(text_b));
    CHECK(lines_of(data(text_a)).size() == 1502);
}

TEST_CASE("sweep writes both tables") {
    const auto dir = scratch_dir("sweep");
    std::ostringstream out, err;
    const auto cfg = config_for(dir, {{"L", "10"}, {"S", "100"}, {"V0", "5"}, {"sweep_var", "g5"},
                                      {"sweep_values", "0,1,3"}, {"n_seeds", "2"}});
    REQUIRE(dispatch(Command::sweep, cfg, out, err, 2) == 0);
    const auto rows = lines_of(slurp(dir / "sweep.csv"));
    std::size_t comments = 0;
    while (comments < rows.size() && rows[comments].starts_with("#")) ++comments;
    REQUIRE(rows.size() == comments + 1 + 6);
    CHECK(rows[comments] == sweep_csv_header);
    const auto agg = lines_of(slurp(dir / "sweep-agg.csv"));
    CHECK(agg.size() == comments + 1 + 3);
    CHECK(agg[comments] == aggregate_csv_header);
}

TEST_CASE("errors map to distinct exit codes") {
    const auto dir = scratch_dir("errors");
    std::ostringstream out, err;
    CHECK(dispatch(Command::fit, config_for(dir, {}), out, err) == static_cast<int>(ErrorKind::configuration));
    CHECK(err.str().rfind("qal: ", 0) == 0);
    CHECK(dispatch(Command::fit, config_for(dir, {{"input", (dir / "missing.dump").string()}}), out, err) ==
          static_cast<int>(ErrorKind::io));
    CHECK(dispatch(Command::sweep, config_for(dir, {}), out, err) == static_cast<int>(ErrorKind::configuration));
    std::ofstream(dir / "flat.dump") << "# x re im density\n";
    CHECK(dispatch(Command::fit, config_for(dir, {{"input", (dir / "flat.dump").string()}}), out, err) != 0);
}

}
