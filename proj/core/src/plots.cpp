#include "cascade/plots.hpp"

#include <algorithm>
#include <cstdio>

#include "cascade/error.hpp"

namespace cascade {

namespace {

class Script {
public:
    Script(const RunManifest& m, const FitTable& fits) : m_(m), fits_(fits) {}

    const std::string& need(const std::string& file) const {
        if (std::find(m_.files.begin(), m_.files.end(), file) == m_.files.end())
            throw Error("plot script: " + file + " is not listed in the run manifest");
        return file;
    }

    std::string slope_label(const std::string& fit, const char* prefix) const {
        auto it = fits_.find(fit);
        if (it == fits_.end()) return "";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.4f", prefix, it->second.slope);
        return buf;
    }

    Script& line(const std::string& s) {
        text_ += s;
        text_ += '\n';
        return *this;
    }

    std::string str() const { return text_; }

private:
    const RunManifest& m_;
    const FitTable& fits_;
    std::string text_;
};

std::string quoted(const std::string& s) { return "'" + s + "'"; }

} // namespace

std::string plot_script_name(const std::string& model) { return "plot_" + model + ".gp"; }

std::string plot_script(const RunManifest& m, const FitTable& fits) {
    Script s(m, fits);
    s.line("# gnuplot " + plot_script_name(m.model) + "  ->  " + m.model + ".png");
    s.line("set terminal pngcairo size 1200,450");
    s.line("set output '" + m.model + ".png'");
    s.line("set datafile separator ','");
    s.line("set grid");

    if (m.model == "goy") {
        const auto f = quoted(s.need("goy_spectrum.csv"));
        s.line("set multiplot layout 1,2");
        s.line("set logscale x");
        s.line("set xlabel 'k_n'");
        s.line("set title '(a) energy flux'");
        s.line("plot " + f + " skip 1 using 2:4 with linespoints title '<Pi_n>'");
        s.line("set logscale xy");
        s.line("set title '(b) shell spectrum" + s.slope_label("goy.spectrum.slope", ", fitted slope ") + "'");
        s.line("plot " + f + " skip 1 using 2:3 with linespoints title '<E(k_n)>', \\");
        s.line("     " + f + " skip 1 using 2:($2**(-5.0/3)) with lines dashtype 2 title 'k^{-5/3}'");
        s.line("unset multiplot");
    } else if (m.model == "pao") {
        const auto f = quoted(s.need("pao_curves.csv"));
        s.line("set multiplot layout 1,2");
        s.line("set logscale x");
        s.line("set xlabel 'k'");
        s.line("set title '(a) Pao flux'");
        s.line("plot " + f + " skip 1 using 1:4 with lines title 'Pi(k)'");
        s.line("set logscale xy");
        s.line("set title '(b) spectra'");
        s.line("plot " + f + " skip 1 using 1:2 with lines title 'E_kolmogorov', \\");
        s.line("     " + f + " skip 1 using 1:3 with lines title 'E_pao'");
        s.line("unset multiplot");
    } else if (m.model == "finance") {
        const auto steady = quoted(s.need("finance_steady.csv"));
        const auto dist = quoted(s.need("finance_distribution.csv"));
        s.line("set multiplot layout 1,3");
        s.line("set logscale x");
        s.line("set xlabel 'k'");
        s.line("set title '(a) money flux'");
        s.line("plot " + steady + " skip 1 using 2:7 with linespoints title 'Pi'");
        s.line("set logscale xy");
        s.line("set title '(b) shell wealth" + s.slope_label("finance.Wk.slope", ", fitted slope ") + "'");
        s.line("plot " + steady + " skip 1 using 2:3 with linespoints title 'W_k', \\");
        s.line("     " + steady + " skip 1 using 2:4 with linespoints title 'W(k)'");
        s.line("set xlabel 'W'");
        s.line("set title '(c) wealth distribution" + s.slope_label("finance.nW.slope", ", fitted slope ") + "'");
        s.line("plot " + dist + " skip 1 using 1:2 with linespoints title 'n(W)'");
        s.line("unset multiplot");
    } else if (m.model == "equilibrium") {
        const auto f = quoted(s.need("equilibrium_hist.csv"));
        s.line("set logscale y");
        s.line("set xlabel 'W'");
        s.line("set title 'exchange equilibrium" + s.slope_label("equilibrium.ccdf.slope", ", CCDF slope ") + "'");
        s.line("plot " + f + " skip 1 using (($1+$2)/2):4 with points title 'P(W) measured', \\");
        s.line("     " + f + " skip 1 using (($1+$2)/2):5 with lines title 'Gibbs'");
    } else if (m.model == "tree") {
        const auto f = quoted(s.need("tree_cascade.csv"));
        s.line("set logscale xy");
        s.line("set xlabel 'per-node wealth'");
        s.line("set ylabel 'nodes'");
        s.line("set title 'tree cascade" + s.slope_label("tree.count_vs_wealth.slope", ", fitted slope ") + "'");
        s.line("plot " + f + " skip 1 using 4:2 with linespoints title 'count'");
    } else {
        throw Error("plot script: unknown model " + m.model);
    }
    return s.str();
}

} // namespace cascade
