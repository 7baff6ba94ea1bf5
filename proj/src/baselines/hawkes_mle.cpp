#include "twinpp/baselines/hawkes_mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "twinpp/numcore/rng.hpp"
#include "twinpp/ppsim/thinning.hpp"

namespace twinpp::baselines {

using ppsim::EventSequence;
using ppsim::MultiHawkes;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sequences(const MultiHawkes& p, const std::vector<EventSequence>& seqs) {
    p.validate();
    for (const auto& s : seqs) {
        s.validate_sorted();
        for (int m : s.marks)
            if (m < 0 || m >= p.dims())
                throw std::invalid_argument("hawkes likelihood: mark out of range");
        if (!s.times.empty() && s.times.back() > s.horizon)
            throw std::invalid_argument("hawkes likelihood: event past the horizon");
    }
}

// Shared accumulation for objective and gradient. grad pointers may be null.
double nll_impl(const MultiHawkes& p, const std::vector<EventSequence>& seqs, double l1_weight,
                std::vector<double>* grad_mu, std::vector<std::vector<double>>* grad_a) {
    check_sequences(p, seqs);
    const auto d = static_cast<std::size_t>(p.dims());
    if (grad_mu != nullptr) {
        grad_mu->assign(d, 0.0);
        grad_a->assign(d, std::vector<double>(d, 0.0));
    }

    double nll = 0.0;
    std::vector<double> s_state(d);
    for (const auto& seq : seqs) {
        std::fill(s_state.begin(), s_state.end(), 0.0);
        double prev_t = 0.0;
        for (std::size_t i = 0; i < seq.times.size(); ++i) {
            const double t = seq.times[i];
            const auto mark = static_cast<std::size_t>(seq.marks.empty() ? 0 : seq.marks[i]);
            const double decay = std::exp(-p.beta * (t - prev_t));
            for (auto& s : s_state) s *= decay;

            double lam = p.mu[mark];
            for (std::size_t j = 0; j < d; ++j) lam += p.A[mark][j] * s_state[j];
            if (!(lam > 0.0)) return kInf;
            nll -= std::log(lam);
            if (grad_mu != nullptr) {
                (*grad_mu)[mark] -= 1.0 / lam;
                for (std::size_t j = 0; j < d; ++j) (*grad_a)[mark][j] -= s_state[j] / lam;
            }

            s_state[mark] += 1.0;
            prev_t = t;
        }

        // Compensator: mu_d*T + sum_i A[d][m_i] (1/beta)(1 - e^{-beta(T-t_i)}).
        const double horizon = seq.horizon;
        for (std::size_t k = 0; k < d; ++k) nll += p.mu[k] * horizon;
        if (grad_mu != nullptr)
            for (std::size_t k = 0; k < d; ++k) (*grad_mu)[k] += horizon;
        for (std::size_t i = 0; i < seq.times.size(); ++i) {
            const auto mark = static_cast<std::size_t>(seq.marks.empty() ? 0 : seq.marks[i]);
            const double tail = (1.0 - std::exp(-p.beta * (horizon - seq.times[i]))) / p.beta;
            for (std::size_t k = 0; k < d; ++k) {
                nll += p.A[k][mark] * tail;
                if (grad_a != nullptr) (*grad_a)[k][mark] += tail;
            }
        }
    }

    if (l1_weight > 0.0) {
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < d; ++j) {
                nll += l1_weight * std::fabs(p.A[k][j]);
                // A >= 0 is maintained by the projection, so |A| = A here.
                if (grad_a != nullptr) (*grad_a)[k][j] += l1_weight;
            }
    }
    return nll;
}

}  // namespace

double hawkes_neg_loglik(const MultiHawkes& p, const std::vector<EventSequence>& seqs,
                         double l1_weight) {
    return nll_impl(p, seqs, l1_weight, nullptr, nullptr);
}

double hawkes_nll_grad(const MultiHawkes& p, const std::vector<EventSequence>& seqs,
                       double l1_weight, std::vector<double>& grad_mu,
                       std::vector<std::vector<double>>& grad_a) {
    return nll_impl(p, seqs, l1_weight, &grad_mu, &grad_a);
}

HawkesFit fit_hawkes(const std::vector<EventSequence>& seqs, int dims, double l1_weight,
                     int max_iters, double beta) {
    if (dims < 1) throw std::invalid_argument("fit_hawkes: dims must be >= 1");
    if (l1_weight < 0.0) throw std::invalid_argument("fit_hawkes: negative l1_weight");
    const auto d = static_cast<std::size_t>(dims);

    std::vector<std::size_t> counts(d, 0);
    double total_t = 0.0;
    for (const auto& s : seqs) {
        total_t += s.horizon;
        for (std::size_t i = 0; i < s.times.size(); ++i)
            counts.at(static_cast<std::size_t>(s.marks.empty() ? 0 : s.marks[i]))++;
    }
    for (std::size_t k = 0; k < d; ++k)
        if (counts[k] == 0)
            throw std::invalid_argument("fit_hawkes: dimension " + std::to_string(k) +
                                        " has no events in the corpus");
    if (!(total_t > 0.0)) throw std::invalid_argument("fit_hawkes: zero total horizon");

    HawkesFit fit;
    fit.l1_weight = l1_weight;
    fit.params.beta = beta;
    fit.params.mu.assign(d, 0.0);
    fit.params.A.assign(d, std::vector<double>(d, 0.1 / static_cast<double>(dims)));
    for (std::size_t k = 0; k < d; ++k)
        fit.params.mu[k] = 0.5 * static_cast<double>(counts[k]) / total_t;

    std::vector<double> gmu;
    std::vector<std::vector<double>> ga;
    double f = hawkes_nll_grad(fit.params, seqs, l1_weight, gmu, ga);
    fit.nll_trace.push_back(f);
    double step = 1.0 / std::sqrt(static_cast<double>(1 + counts.size()));

    for (int iter = 0; iter < max_iters; ++iter) {
        // Projected-gradient norm for the stopping rule: at an active bound
        // only the inward component counts.
        double pg_sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double g = fit.params.mu[k] > 0.0 ? gmu[k] : std::min(gmu[k], 0.0);
            pg_sq += g * g;
        }
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < d; ++j) {
                const double g = fit.params.A[k][j] > 0.0 ? ga[k][j] : std::min(ga[k][j], 0.0);
                pg_sq += g * g;
            }
        if (std::sqrt(pg_sq) < 1e-5) {
            fit.converged = true;
            break;
        }

        MultiHawkes trial = fit.params;
        double f_trial = kInf;
        bool accepted = false;
        for (int back = 0; back < 60; ++back) {
            double move_sq = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                trial.mu[k] = std::max(0.0, fit.params.mu[k] - step * gmu[k]);
                const double dm = trial.mu[k] - fit.params.mu[k];
                move_sq += dm * dm;
            }
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t j = 0; j < d; ++j) {
                    trial.A[k][j] = std::max(0.0, fit.params.A[k][j] - step * ga[k][j]);
                    const double da = trial.A[k][j] - fit.params.A[k][j];
                    move_sq += da * da;
                }
            if (move_sq == 0.0) break;
            f_trial = hawkes_neg_loglik(trial, seqs, l1_weight);
            if (f_trial <= f - 1e-4 * move_sq / step) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            fit.converged = true;  // no feasible descent direction at machine scale
            break;
        }

        fit.params = trial;
        f = hawkes_nll_grad(fit.params, seqs, l1_weight, gmu, ga);
        fit.nll_trace.push_back(f);
        fit.iterations = iter + 1;
        step *= 2.0;  // optimistic growth, backtracking will trim it
    }
    return fit;
}

HawkesFit fit_hawkes_select_beta(const std::vector<EventSequence>& train,
                                 const std::vector<EventSequence>& val, int dims, double l1_weight,
                                 int max_iters, const std::vector<double>& betas) {
    if (betas.empty()) throw std::invalid_argument("fit_hawkes_select_beta: empty beta grid");
    HawkesFit best;
    double best_score = kInf;
    for (double beta : betas) {
        HawkesFit fit = fit_hawkes(train, dims, l1_weight, max_iters, beta);
        const double score =
            val.empty() ? fit.nll_trace.back() : hawkes_neg_loglik(fit.params, val, 0.0);
        if (score < best_score) {
            best_score = score;
            best = std::move(fit);
        }
    }
    return best;
}

NextEventPrediction hawkes_predict_next(const MultiHawkes& p, const EventSequence& history,
                                        int n_rollouts, std::uint64_t seed, double cap_days) {
    p.validate();
    history.validate_sorted();
    if (n_rollouts < 1) throw std::invalid_argument("hawkes_predict_next: n_rollouts must be >= 1");
    const double t0 = history.times.empty() ? 0.0 : history.times.back();

    std::vector<std::size_t> mark_votes(static_cast<std::size_t>(p.dims()), 0);
    double gap_sum = 0.0;
    for (int r = 0; r < n_rollouts; ++r) {
        const EventSequence cont = ppsim::sample_thinning(
            p, cap_days, num::Rng::mix(seed, static_cast<std::uint64_t>(r)), &history, t0);
        if (cont.times.empty()) {
            gap_sum += cap_days;
        } else {
            gap_sum += cont.times.front() - t0;
            mark_votes[static_cast<std::size_t>(cont.marks.front())]++;
        }
    }

    NextEventPrediction out;
    out.gap_days = gap_sum / static_cast<double>(n_rollouts);
    std::size_t best = 0;
    for (std::size_t k = 1; k < mark_votes.size(); ++k)
        if (mark_votes[k] > mark_votes[best]) best = k;
    out.type = static_cast<int>(best);
    return out;
}

nlohmann::json hawkes_fit_to_json(const HawkesFit& fit) {
    return nlohmann::json{{"format_version", 1},
                          {"generator",
                           {{"mu", fit.params.mu}, {"A", fit.params.A}, {"beta", fit.params.beta}}},
                          {"l1_weight", fit.l1_weight},
                          {"iterations", fit.iterations},
                          {"converged", fit.converged},
                          {"nll_trace", fit.nll_trace}};
}

HawkesFit hawkes_fit_from_json(const nlohmann::json& doc) {
    HawkesFit fit;
    const auto& gen = doc.at("generator");
    fit.params.mu = gen.at("mu").get<std::vector<double>>();
    fit.params.A = gen.at("A").get<std::vector<std::vector<double>>>();
    fit.params.beta = gen.at("beta").get<double>();
    fit.l1_weight = doc.value("l1_weight", 0.0);
    fit.iterations = doc.value("iterations", 0);
    fit.converged = doc.value("converged", false);
    if (doc.contains("nll_trace")) fit.nll_trace = doc.at("nll_trace").get<std::vector<double>>();
    fit.params.validate();
    return fit;
}

}  // namespace twinpp::baselines
