#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "cascade/analysis.hpp"
#include "cascade/error.hpp"
#include "cascade/finance.hpp"
#include "cascade/statfit.hpp"

using namespace cascade;

namespace {

FinanceParams params(std::size_t n = 8) { return FinanceParams(ShellGrid(1.0, 2.0, n)); }

WealthState random_wealth(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    WealthState s;
    for (std::size_t i = 0; i < n; ++i) s.W.push_back(u(rng));
    return s;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Plain RK4 on the chosen right-hand side, for checks that bypass the driver.
WealthState integrate(WealthState s, const FinanceParams& p, double dt, int steps) {
    const std::size_t n = s.W.size();
    auto at = [&](const WealthState& base, const std::vector<double>& k, double h) {
        WealthState x = base;
        for (std::size_t i = 0; i < n; ++i) x.W[i] += h * k[i];
        return x;
    };
    for (int i = 0; i < steps; ++i) {
        const auto k1 = finance_rhs(s, p);
        const auto k2 = finance_rhs(at(s, k1, dt / 2), p);
        const auto k3 = finance_rhs(at(s, k2, dt / 2), p);
        const auto k4 = finance_rhs(at(s, k3, dt), p);
        for (std::size_t j = 0; j < n; ++j) s.W[j] += dt / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
        s.t += dt;
    }
    return s;
}

SimConfig finance_cfg(double alpha) {
    auto cfg = default_config(ModelKind::finance);
    std::get<FinanceSection>(cfg.params).alpha = alpha;
    return cfg;
}

} // namespace

TEST(FinanceLiteral, ZeroStateNoInjection) {
    auto p = params();
    p.mode = FinanceMode::literal;
    p.q = 0.0;
    WealthState s;
    s.W.assign(8, 0.0);
    for (double d : finance_rhs_literal(s, p)) EXPECT_EQ(d, 0.0);
}

TEST(FinanceLiteral, ZeroStateInjectsFirstShellOnly) {
    auto p = params();
    p.mode = FinanceMode::literal;
    WealthState s;
    s.W.assign(8, 0.0);
    const auto d = finance_rhs_literal(s, p);
    EXPECT_EQ(d[0], 1.0);
    for (std::size_t n = 1; n < d.size(); ++n) EXPECT_EQ(d[n], 0.0);
}

TEST(FinanceLiteral, MatchesFormula) {
    auto p = params(6);
    p.mode = FinanceMode::literal;
    p.sink_law = SinkLaw::linear;
    p.sink = 3.0;
    p.b = 0.2;
    p.alpha = -0.7;
    const auto s = random_wealth(6, 1);
    const auto d = finance_rhs_literal(s, p);
    for (std::size_t n = 0; n < 6; ++n) {
        const double k = std::pow(2.0, static_cast<double>(n));
        const double left = n > 0 ? s.W[n - 1] : 0.0, right = n < 5 ? s.W[n + 1] : 0.0;
        double want = p.a * std::pow(k, p.alpha) * left * right - p.b * k * k * s.W[n];
        if (n == 0) want += p.q;
        if (n == 5) want -= 3.0 * s.W[5];
        EXPECT_NEAR(d[n], want, 1e-13);
    }
}

TEST(FinanceLiteral, DecoupledLinearDecay) {
    auto p = params(5);
    p.mode = FinanceMode::literal;
    p.a = 0.0;
    p.q = 0.0;
    p.b = 0.3;
    p.sink_law = SinkLaw::linear;
    p.sink = 0.0;
    const auto s0 = random_wealth(5, 2);
    const auto s = integrate(s0, p, 1e-3, 1000);
    for (std::size_t n = 0; n < 5; ++n) {
        const double rate = 0.3 * std::pow(4.0, static_cast<double>(n));
        EXPECT_NEAR(s.W[n], s0.W[n] * std::exp(-rate), 1e-9 * s0.W[n]) << n;
    }
}

TEST(FinanceFlux, TelescopesWithoutSources) {
    auto p = params(12);
    p.b = 0.0;
    p.q = 0.0;
    p.sink_law = SinkLaw::linear;
    p.sink = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = random_wealth(12, seed);
        const auto d = finance_rhs_fluxform(s, p);
        double scale = 0.0;
        for (double x : d) scale += std::abs(x);
        EXPECT_LE(std::abs(sum(d)), 1e-14 * scale);
    }
}

TEST(FinanceFlux, ZeroStateInjectsFirstShellOnly) {
    const auto p = params();
    WealthState s;
    s.W.assign(8, 0.0);
    const auto d = finance_rhs_fluxform(s, p);
    EXPECT_EQ(d[0], 1.0);
    for (std::size_t n = 1; n < d.size(); ++n) EXPECT_EQ(d[n], 0.0);
    for (double f : money_flux(s, p)) EXPECT_EQ(f, 0.0);
}

TEST(FinanceFlux, AnalyticFixedPointIsStationary) {
    // a k_n^alpha W_n W_{n+1} = Q at every interior boundary; with the outflow
    // sink the ladder W_n = sqrt(Q) lambda^{n/2} lambda^{-1/4} is exact.
    auto p = params(16);
    WealthState s;
    for (std::size_t n = 0; n < 16; ++n) s.W.push_back(std::pow(2.0, n / 2.0 - 0.25));
    for (double f : money_flux(s, p)) EXPECT_NEAR(f, 1.0, 1e-13);
    EXPECT_NEAR(sink_outflow(s, p), 1.0, 1e-13);
    for (double d : finance_rhs(s, p)) EXPECT_NEAR(d, 0.0, 1e-12);
    EXPECT_LT(steady_residual(s, p), 1e-12);
}

TEST(FinanceFlux, BilinearScaling) {
    auto p = params(10);
    const auto s = random_wealth(10, 3);
    auto scaled = s;
    for (double& w : scaled.W) w *= std::sqrt(2.0);
    p.q = 2.0;
    const auto f1 = money_flux(s, p), f2 = money_flux(scaled, p);
    for (std::size_t n = 0; n < f1.size(); ++n) EXPECT_NEAR(f2[n], 2.0 * f1[n], 1e-13 * f1[n]);
}

TEST(FinanceFlux, DimensionMismatch) {
    const auto p = params(8);
    EXPECT_THROW(finance_rhs(random_wealth(7, 1), p), Error);
    EXPECT_THROW(money_flux(random_wealth(9, 1), p), Error);
}

TEST(MoneyFlux, LiteralZeroStateCarriesInjection) {
    auto p = params();
    p.mode = FinanceMode::literal;
    WealthState s;
    s.W.assign(8, 0.0);
    const auto f = money_flux(s, p);
    // Q enters shell 0 and accumulates there: the budget flux past it is zero.
    for (double x : f) EXPECT_EQ(x, 0.0);
}

// Q = d/dt(sum W) + sum loss + sink outflow, at any state, in flux form.
TEST(FinanceBudget, IdentityAtArbitraryStates) {
    for (auto law : {SinkLaw::linear, SinkLaw::outflow}) {
        auto p = params(12);
        p.b = 0.05;
        p.alpha = -0.5;
        p.q = 1.7;
        p.sink_law = law;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto s = random_wealth(12, seed);
            const auto d = finance_rhs(s, p);
            double loss = 0.0;
            for (std::size_t n = 0; n < 12; ++n) loss += p.b * std::pow(4.0, static_cast<double>(n)) * s.W[n];
            EXPECT_NEAR(p.q, sum(d) + loss + sink_outflow(s, p), 1e-12 * (1 + loss));
            // The budget flux past the last interior boundary feeds the last shell.
            const auto bf = budget_flux(s, p);
            const double last_loss = p.b * std::pow(4.0, 11.0) * s.W[11];
            EXPECT_NEAR(bf.back(), d[11] + last_loss + sink_outflow(s, p), 1e-9 * (1 + last_loss));
        }
    }
}

TEST(FinanceBudget, BudgetFluxRecursion) {
    auto p = params(10);
    p.mode = FinanceMode::literal;
    p.b = 0.1;
    const auto s = random_wealth(10, 4);
    const auto d = finance_rhs(s, p);
    const auto bf = budget_flux(s, p);
    EXPECT_NEAR(bf[0], p.q - p.b * s.W[0] - d[0], 1e-13);
    for (std::size_t n = 1; n < bf.size(); ++n) {
        const double loss = p.b * std::pow(4.0, static_cast<double>(n)) * s.W[n];
        EXPECT_NEAR(bf[n - 1] - bf[n], loss + d[n], 1e-10 * (1 + loss));
    }
    EXPECT_EQ(money_flux(s, p), bf);
}

TEST(FinanceConservation, ClosedSystemOverLongHorizon) {
    auto p = params(10);
    p.q = 0.0;
    p.sink_law = SinkLaw::linear;
    p.sink = 0.0;
    p.alpha = -1.0;
    const auto s0 = random_wealth(10, 5);
    const double total = sum(s0.W);
    auto s = s0;
    for (int chunk = 0; chunk < 10; ++chunk) {
        s = integrate(s, p, 1e-3, 2000);
        EXPECT_LT(std::abs(sum(s.W) - total) / total, 1e-9) << s.t;
    }
}

TEST(ShellFluxes, BoundaryTerms) {
    const auto p = params(8);
    const auto s = random_wealth(8, 6);
    const auto f = shell_fluxes(s, p);
    const auto interior = money_flux(s, p);
    EXPECT_EQ(f.left[0], p.q);
    EXPECT_EQ(f.right[7], sink_outflow(s, p));
    for (std::size_t n = 0; n + 1 < 8; ++n) {
        EXPECT_EQ(f.right[n], interior[n]);
        EXPECT_EQ(f.left[n + 1], interior[n]);
    }
}

// One converged default run shared across checks of the steady state.
class FinanceDefaultRun : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        cfg_ = new SimConfig(finance_cfg(-1.0));
        rep_ = new SteadyStateReport(run_to_steady_state(*cfg_));
    }
    static void TearDownTestSuite() {
        delete rep_;
        delete cfg_;
    }
    static SimConfig* cfg_;
    static SteadyStateReport* rep_;
};

SimConfig* FinanceDefaultRun::cfg_ = nullptr;
SteadyStateReport* FinanceDefaultRun::rep_ = nullptr;

TEST_F(FinanceDefaultRun, Converged) {
    EXPECT_TRUE(rep_->converged);
    EXPECT_LT(rep_->residual_norm, cfg_->integrator.steady_tol);
    EXPECT_EQ(rep_->clamped, 0u);
}

TEST_F(FinanceDefaultRun, ShellWealthSlopeHalf) {
    const auto a = analyze_finance(*rep_, FinanceParams::from_config(*cfg_));
    EXPECT_NEAR(a.w_shell_fit.slope, 0.5, 0.05);
    EXPECT_NEAR(a.w_entity_fit.slope, -0.5, 0.05);
}

TEST_F(FinanceDefaultRun, FixedPointIdentity) {
    const auto& W = rep_->W_star.W;
    for (std::size_t n = 1; n + 2 < W.size(); ++n) {
        const double k = std::pow(2.0, static_cast<double>(n));
        EXPECT_NEAR(W[n] * W[n + 1] / k, 1.0, 0.01) << n;
        EXPECT_NEAR(W[n] / std::pow(2.0, n / 2.0 - 0.25), 1.0, 0.01) << n;
    }
}

TEST_F(FinanceDefaultRun, ConstantFluxEqualToInjection) {
    for (double f : rep_->flux) EXPECT_NEAR(f, 1.0, 0.01);
    EXPECT_LT(relative_spread(rep_->flux), 0.01);
}

TEST_F(FinanceDefaultRun, ParetoExponent) {
    const auto a = analyze_finance(*rep_, FinanceParams::from_config(*cfg_));
    EXPECT_NEAR(a.nw_fit.slope, -2.0, 0.1);
    ASSERT_TRUE(a.predicted);
    EXPECT_EQ(a.predicted->n_of_w, -2.0);
}

TEST_F(FinanceDefaultRun, EntityWealthSteadyScaling) {
    const auto e = entity_wealth(rep_->W_star, FinanceParams::from_config(*cfg_).grid);
    const auto fit = loglog_fit(std::span(e.k).subspan(1, e.k.size() - 2), std::span(e.wealth).subspan(1, e.k.size() - 2));
    EXPECT_NEAR(fit.slope, -0.5, 0.01);
}

TEST(FinanceSteady, ExponentChainAcrossAlpha) {
    for (double alpha : {-0.5, 0.0, 1.0}) {
        const auto cfg = finance_cfg(alpha);
        const auto rep = run_to_steady_state(cfg);
        EXPECT_TRUE(rep.converged) << alpha;
        const auto a = analyze_finance(rep, FinanceParams::from_config(cfg));
        EXPECT_NEAR(a.nw_fit.slope, -2.0 / (alpha + 2.0), 0.1) << alpha;
        EXPECT_NEAR(a.w_shell_fit.slope, -alpha / 2.0, 0.05) << alpha;
        EXPECT_LT(a.flux_spread, 0.01) << alpha;
    }
}

TEST(FinanceSteady, NoInjectionDecaysToZero) {
    auto cfg = finance_cfg(-1.0);
    auto& f = std::get<FinanceSection>(cfg.params);
    f.q = 0.0;
    f.b = 0.1;
    const auto rep = run_to_steady_state(cfg);
    EXPECT_TRUE(rep.converged);
    for (double w : rep.W_star.W) EXPECT_LT(w, 1e-6);
}

TEST(FinanceSteady, ScaleCovariance) {
    auto cfg = finance_cfg(-1.0);
    const auto base = run_to_steady_state(cfg);
    std::get<FinanceSection>(cfg.params).q = 4.0;
    const auto scaled = run_to_steady_state(cfg);
    ASSERT_TRUE(base.converged && scaled.converged);
    for (std::size_t n = 0; n < base.W_star.W.size(); ++n)
        EXPECT_NEAR(scaled.W_star.W[n] / base.W_star.W[n], 2.0, 1e-4) << n;
}

TEST(FinanceSteady, DoublingInjectionDoublesCounts) {
    auto cfg = finance_cfg(-1.0);
    const auto p1 = FinanceParams::from_config(cfg);
    const auto a1 = analyze_finance(run_to_steady_state(cfg), p1);
    std::get<FinanceSection>(cfg.params).q = 2.0;
    const auto a2 = analyze_finance(run_to_steady_state(cfg), FinanceParams::from_config(cfg));
    EXPECT_NEAR(a2.nw_fit.intercept - a1.nw_fit.intercept, std::log(2.0), 0.02);
    EXPECT_NEAR(a2.nw_fit.slope, a1.nw_fit.slope, 1e-3);
}

TEST(FinanceSteady, NonnegativeInEveryMode) {
    for (auto mode : {FinanceMode::literal, FinanceMode::flux_form}) {
        for (double alpha : {-1.0, 0.0}) {
            auto cfg = finance_cfg(alpha);
            auto& f = std::get<FinanceSection>(cfg.params);
            f.mode = mode;
            f.b = 0.01;
            f.sink_law = SinkLaw::linear;
            cfg.integrator.t_end = 50.0;
            const auto rep = run_to_steady_state(cfg);
            for (double w : rep.W_star.W) EXPECT_GE(w, 0.0);
        }
    }
}

TEST(FinanceSteady, UnconvergedIsReported) {
    auto cfg = finance_cfg(-1.0);
    cfg.integrator.t_end = 1.0;
    const auto rep = run_to_steady_state(cfg);
    EXPECT_FALSE(rep.converged);
    EXPECT_GT(rep.residual_norm, cfg.integrator.steady_tol);
    EXPECT_NEAR(rep.W_star.t, 1.0, 1e-9);
}

TEST(FinanceSteady, WrongModelRejected) {
    EXPECT_THROW(run_to_steady_state(default_config(ModelKind::goy)), ConfigError);
}

TEST(EntityWealth, Examples) {
    const ShellGrid g(1.0, 2.0, 6);
    WealthState s;
    for (double k : g.wavenumbers()) s.W.push_back(2.0 * std::numbers::pi * k);
    const auto e = entity_wealth(s, g);
    for (double w : e.wealth) EXPECT_NEAR(w, 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(e.entities[0], 2.0 * std::numbers::pi);
}

TEST(WealthDistribution, SortedAndSkipsEmptyShells) {
    const ShellGrid g(1.0, 2.0, 5);
    WealthState s;
    s.W = {5.0, 0.0, 1.0, 30.0, 2.0};
    const auto d = wealth_distribution(s, g);
    ASSERT_EQ(d.wealth.size(), 4u);
    for (std::size_t i = 0; i + 1 < d.wealth.size(); ++i) EXPECT_LT(d.wealth[i], d.wealth[i + 1]);
    for (double c : d.count) EXPECT_GT(c, 0.0);
}

TEST(WealthDistribution, PureLadderSlopes) {
    const ShellGrid g(1.0, 2.0, 20);
    for (double alpha : {-1.0, -0.5, 0.0, 1.0}) {
        WealthState s;
        for (double k : g.wavenumbers()) s.W.push_back(std::pow(k, -alpha / 2.0));
        const auto d = wealth_distribution(s, g);
        EXPECT_NEAR(loglog_fit(d.wealth, d.count).slope, predicted_exponent(alpha).n_of_w, 1e-10) << alpha;
    }
}

TEST(PredictedExponent, Examples) {
    EXPECT_EQ(predicted_exponent(-1.0).n_of_w, -2.0);
    EXPECT_EQ(predicted_exponent(-1.0).flux, 1.0);
    EXPECT_EQ(predicted_exponent(0.0).n_of_w, -1.0);
    EXPECT_EQ(predicted_exponent(0.0).flux, 0.5);
    EXPECT_THROW(predicted_exponent(-2.0), DomainError);
}

TEST(TreeCascade, NoPilferageConservesLevelBudget) {
    for (const auto& l : tree_cascade(6, 4, 2.5, 0.0)) EXPECT_DOUBLE_EQ(l.level_budget, 2.5);
}

TEST(TreeCascade, BranchingThreeEnumeration) {
    const auto t = tree_cascade(3, 3, 1.0, 0.0);
    ASSERT_EQ(t.size(), 4u);
    const double w[] = {1.0, 1.0 / 3, 1.0 / 9, 1.0 / 27};
    const std::uint64_t n[] = {1, 3, 9, 27};
    for (std::size_t l = 0; l < 4; ++l) {
        EXPECT_EQ(t[l].level, l);
        EXPECT_EQ(t[l].nodes, n[l]);
        EXPECT_NEAR(t[l].per_node_wealth, w[l], 1e-15);
    }
    EXPECT_NEAR(analyze_tree(t).slope, -1.0, 1e-12);
}

TEST(TreeCascade, PilferageSlope) {
    const auto t = tree_cascade(5, 2, 1.0, 0.5);
    for (const auto& l : t) {
        EXPECT_NEAR(l.per_node_wealth, std::pow(0.25, static_cast<double>(l.level)), 1e-15);
        EXPECT_EQ(l.nodes, 1ull << l.level);
    }
    EXPECT_NEAR(analyze_tree(t).slope, -0.5, 1e-12);
    for (auto [b, p] : {std::pair{3, 0.2}, std::pair{5, 0.7}}) {
        const auto fit = analyze_tree(tree_cascade(4, b, 1.0, p));
        EXPECT_NEAR(fit.slope, -std::log(b) / (std::log(b) - std::log(1 - p)), 1e-12);
    }
}

TEST(TreeCascade, RejectsBadArguments) {
    EXPECT_THROW(tree_cascade(0, 2, 1.0, 0.0), DomainError);
    EXPECT_THROW(tree_cascade(3, 1, 1.0, 0.0), DomainError);
    EXPECT_THROW(tree_cascade(3, 2, 1.0, 1.0), DomainError);
    EXPECT_THROW(tree_cascade(100, 2, 1.0, 0.0), DomainError);
}
