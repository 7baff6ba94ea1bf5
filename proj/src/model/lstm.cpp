#include "twinpp/model/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace twinpp::model {

using num::Mat;
using num::ParamStore;
using num::Vec;

LstmParams LstmParams::create(ParamStore& store, const std::string& prefix, int input_dim,
                              int hidden_dim, bool dense_peephole) {
    const auto h = static_cast<std::size_t>(hidden_dim);
    const auto in = static_cast<std::size_t>(input_dim);
    const std::size_t peep_cols = dense_peephole ? h : 1;
    LstmParams p;
    p.W_i = &store.add(prefix + "W_i", h, in);
    p.W_f = &store.add(prefix + "W_f", h, in);
    p.W_c = &store.add(prefix + "W_c", h, in);
    p.W_o = &store.add(prefix + "W_o", h, in);
    p.U_i = &store.add(prefix + "U_i", h, h);
    p.U_f = &store.add(prefix + "U_f", h, h);
    p.U_c = &store.add(prefix + "U_c", h, h);
    p.U_o = &store.add(prefix + "U_o", h, h);
    p.V_i = &store.add(prefix + "V_i", h, peep_cols);
    p.V_f = &store.add(prefix + "V_f", h, peep_cols);
    p.V_o = &store.add(prefix + "V_o", h, peep_cols);
    p.b_i = &store.add(prefix + "b_i", h, 1);
    p.b_f = &store.add(prefix + "b_f", h, 1);
    p.b_c = &store.add(prefix + "b_c", h, 1);
    p.b_o = &store.add(prefix + "b_o", h, 1);
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.dense_peephole = dense_peephole;
    return p;
}

LstmParams LstmParams::attach(ParamStore& store, const std::string& prefix, int input_dim,
                              int hidden_dim, bool dense_peephole) {
    LstmParams p;
    p.W_i = &store.at(prefix + "W_i");
    p.W_f = &store.at(prefix + "W_f");
    p.W_c = &store.at(prefix + "W_c");
    p.W_o = &store.at(prefix + "W_o");
    p.U_i = &store.at(prefix + "U_i");
    p.U_f = &store.at(prefix + "U_f");
    p.U_c = &store.at(prefix + "U_c");
    p.U_o = &store.at(prefix + "U_o");
    p.V_i = &store.at(prefix + "V_i");
    p.V_f = &store.at(prefix + "V_f");
    p.V_o = &store.at(prefix + "V_o");
    p.b_i = &store.at(prefix + "b_i");
    p.b_f = &store.at(prefix + "b_f");
    p.b_c = &store.at(prefix + "b_c");
    p.b_o = &store.at(prefix + "b_o");
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.dense_peephole = dense_peephole;
    if (p.W_i->value.rows() != static_cast<std::size_t>(hidden_dim) ||
        p.W_i->value.cols() != static_cast<std::size_t>(input_dim))
        throw std::invalid_argument("lstm attach: shape mismatch for " + prefix + "W_i");
    return p;
}

namespace {

// z = W x + U h + b; optionally z += peephole(V, c).
Vec gate_preact(const Mat& w, const Vec& x, const Mat& u, const Vec& h, const Mat& b,
                const Mat* v, const Vec* c, bool dense) {
    Vec z(w.rows(), 0.0);
    num::matvec_acc(w, x, z);
    num::matvec_acc(u, h, z);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += b.data()[k];
    if (v != nullptr && c != nullptr) {
        if (dense) {
            num::matvec_acc(*v, *c, z);
        } else {
            for (std::size_t k = 0; k < z.size(); ++k) z[k] += v->data()[k] * (*c)[k];
        }
    }
    return z;
}

}  // namespace

void lstm_step_traced(const LstmParams& p, const Vec& x, const Vec& h_prev, const Vec& c_prev,
                      LstmStepTrace& out) {
    if (x.size() != static_cast<std::size_t>(p.input_dim))
        throw std::invalid_argument("lstm_step: input dimension mismatch");
    if (h_prev.size() != static_cast<std::size_t>(p.hidden_dim) ||
        c_prev.size() != static_cast<std::size_t>(p.hidden_dim))
        throw std::invalid_argument("lstm_step: state dimension mismatch");

    const bool dense = p.dense_peephole;
    out.x = x;
    out.h_prev = h_prev;
    out.c_prev = c_prev;
    out.i = num::sigmoid(
        gate_preact(p.W_i->value, x, p.U_i->value, h_prev, p.b_i->value, &p.V_i->value, &c_prev, dense));
    out.f = num::sigmoid(
        gate_preact(p.W_f->value, x, p.U_f->value, h_prev, p.b_f->value, &p.V_f->value, &c_prev, dense));
    out.g = num::tanh_v(
        gate_preact(p.W_c->value, x, p.U_c->value, h_prev, p.b_c->value, nullptr, nullptr, dense));

    const auto h = static_cast<std::size_t>(p.hidden_dim);
    out.c = Vec(h);
    for (std::size_t k = 0; k < h; ++k) out.c[k] = out.f[k] * c_prev[k] + out.i[k] * out.g[k];

    out.o = num::sigmoid(
        gate_preact(p.W_o->value, x, p.U_o->value, h_prev, p.b_o->value, &p.V_o->value, &out.c, dense));

    out.tanh_c = num::tanh_v(out.c);
    out.h = Vec(h);
    for (std::size_t k = 0; k < h; ++k) out.h[k] = out.o[k] * out.tanh_c[k];
}

std::pair<Vec, Vec> lstm_step(const LstmParams& p, const Vec& x, const Vec& h_prev,
                              const Vec& c_prev) {
    LstmStepTrace tr;
    lstm_step_traced(p, x, h_prev, c_prev, tr);
    return {tr.h, tr.c};
}

Vec lstm_forward(const LstmParams& p, const std::vector<Vec>& inputs,
                 std::vector<LstmStepTrace>& steps) {
    const auto h = static_cast<std::size_t>(p.hidden_dim);
    steps.resize(inputs.size());
    Vec hs(h, 0.0), cs(h, 0.0);
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        lstm_step_traced(p, inputs[t], hs, cs, steps[t]);
        hs = steps[t].h;
        cs = steps[t].c;
    }
    return hs;
}

void lstm_backward(const LstmParams& p, const std::vector<LstmStepTrace>& steps,
                   const Vec& d_h_last, std::vector<Vec>* d_inputs) {
    const auto h = static_cast<std::size_t>(p.hidden_dim);
    if (d_h_last.size() != h) throw std::invalid_argument("lstm_backward: gradient dim mismatch");
    if (d_inputs != nullptr) d_inputs->assign(steps.size(), Vec());

    const bool dense = p.dense_peephole;
    Vec dh = d_h_last;
    Vec dc(h, 0.0);
    Vec di(h), df(h), dg(h), dout(h);

    for (std::size_t t = steps.size(); t-- > 0;) {
        const LstmStepTrace& tr = steps[t];

        // Pre-activation gradients. The output gate reads the current cell,
        // so its contribution feeds dc before the i/f/g split.
        for (std::size_t k = 0; k < h; ++k)
            dout[k] = dh[k] * tr.tanh_c[k] * tr.o[k] * (1.0 - tr.o[k]);
        for (std::size_t k = 0; k < h; ++k)
            dc[k] += dh[k] * tr.o[k] * (1.0 - tr.tanh_c[k] * tr.tanh_c[k]);
        if (dense) {
            num::matvec_t_acc(p.V_o->value, dout, dc);
        } else {
            for (std::size_t k = 0; k < h; ++k) dc[k] += dout[k] * p.V_o->value.data()[k];
        }
        for (std::size_t k = 0; k < h; ++k) {
            di[k] = dc[k] * tr.g[k] * tr.i[k] * (1.0 - tr.i[k]);
            df[k] = dc[k] * tr.c_prev[k] * tr.f[k] * (1.0 - tr.f[k]);
            dg[k] = dc[k] * tr.i[k] * (1.0 - tr.g[k] * tr.g[k]);
        }

        num::outer_acc(di, tr.x, p.W_i->grad);
        num::outer_acc(df, tr.x, p.W_f->grad);
        num::outer_acc(dg, tr.x, p.W_c->grad);
        num::outer_acc(dout, tr.x, p.W_o->grad);
        num::outer_acc(di, tr.h_prev, p.U_i->grad);
        num::outer_acc(df, tr.h_prev, p.U_f->grad);
        num::outer_acc(dg, tr.h_prev, p.U_c->grad);
        num::outer_acc(dout, tr.h_prev, p.U_o->grad);
        for (std::size_t k = 0; k < h; ++k) {
            p.b_i->grad.data()[k] += di[k];
            p.b_f->grad.data()[k] += df[k];
            p.b_c->grad.data()[k] += dg[k];
            p.b_o->grad.data()[k] += dout[k];
        }
        if (dense) {
            num::outer_acc(di, tr.c_prev, p.V_i->grad);
            num::outer_acc(df, tr.c_prev, p.V_f->grad);
            num::outer_acc(dout, tr.c, p.V_o->grad);
        } else {
            for (std::size_t k = 0; k < h; ++k) {
                p.V_i->grad.data()[k] += di[k] * tr.c_prev[k];
                p.V_f->grad.data()[k] += df[k] * tr.c_prev[k];
                p.V_o->grad.data()[k] += dout[k] * tr.c[k];
            }
        }

        if (d_inputs != nullptr) {
            Vec dx(static_cast<std::size_t>(p.input_dim), 0.0);
            num::matvec_t_acc(p.W_i->value, di, dx);
            num::matvec_t_acc(p.W_f->value, df, dx);
            num::matvec_t_acc(p.W_c->value, dg, dx);
            num::matvec_t_acc(p.W_o->value, dout, dx);
            (*d_inputs)[t] = std::move(dx);
        }

        // State gradients for step t-1.
        Vec dh_prev(h, 0.0);
        num::matvec_t_acc(p.U_i->value, di, dh_prev);
        num::matvec_t_acc(p.U_f->value, df, dh_prev);
        num::matvec_t_acc(p.U_c->value, dg, dh_prev);
        num::matvec_t_acc(p.U_o->value, dout, dh_prev);

        Vec dc_prev(h, 0.0);
        for (std::size_t k = 0; k < h; ++k) dc_prev[k] = dc[k] * tr.f[k];
        if (dense) {
            num::matvec_t_acc(p.V_i->value, di, dc_prev);
            num::matvec_t_acc(p.V_f->value, df, dc_prev);
        } else {
            for (std::size_t k = 0; k < h; ++k)
                dc_prev[k] += di[k] * p.V_i->value.data()[k] + df[k] * p.V_f->value.data()[k];
        }

        dh = std::move(dh_prev);
        dc = std::move(dc_prev);
    }
}

}  // namespace twinpp::model
