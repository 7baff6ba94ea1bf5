#pragma once

#include <string>
#include <utility>
#include <vector>

#include "twinpp/numcore/param_store.hpp"

namespace twinpp::model {

// Peephole LSTM parameters, stored as named tensors in a ParamStore under a
// prefix ("y." for the time-series stream, "z." for the event stream).
// Peepholes default to the diagonal form (one weight per cell unit, shape
// hidden x 1); the dense hidden x hidden form follows the literal matrix
// product in the gate equations and is config-gated.
struct LstmParams {
    num::Tensor *W_i, *W_f, *W_c, *W_o;  // hidden x input
    num::Tensor *U_i, *U_f, *U_c, *U_o;  // hidden x hidden
    num::Tensor *V_i, *V_f, *V_o;        // peephole
    num::Tensor *b_i, *b_f, *b_c, *b_o;  // hidden x 1
    int input_dim = 0;
    int hidden_dim = 0;
    bool dense_peephole = false;

    static LstmParams create(num::ParamStore& store, const std::string& prefix, int input_dim,
                             int hidden_dim, bool dense_peephole);
    static LstmParams attach(num::ParamStore& store, const std::string& prefix, int input_dim,
                             int hidden_dim, bool dense_peephole);
};

// Everything the backward pass needs about one step.
struct LstmStepTrace {
    num::Vec x, h_prev, c_prev;
    num::Vec i, f, g, o, c, h, tanh_c;
};

// One cell update:
//   i = sig(W_i x + U_i h_prev + V_i c_prev + b_i)
//   f = sig(W_f x + U_f h_prev + V_f c_prev + b_f)
//   c = f.c_prev + i.tanh(W_c x + U_c h_prev + b_c)
//   o = sig(W_o x + U_o h_prev + V_o c + b_o)
//   h = o.tanh(c)
std::pair<num::Vec, num::Vec> lstm_step(const LstmParams& p, const num::Vec& x,
                                        const num::Vec& h_prev, const num::Vec& c_prev);

// Step that records the trace for BPTT.
void lstm_step_traced(const LstmParams& p, const num::Vec& x, const num::Vec& h_prev,
                      const num::Vec& c_prev, LstmStepTrace& out);

// Unrolled forward over a sequence from zero initial state; returns the
// final hidden state and fills `steps`.
num::Vec lstm_forward(const LstmParams& p, const std::vector<num::Vec>& inputs,
                      std::vector<LstmStepTrace>& steps);

// BPTT given the gradient w.r.t. the final hidden state. Parameter
// gradients are accumulated (+=) into the store. When `d_inputs` is
// non-null it receives the gradient w.r.t. every input vector.
void lstm_backward(const LstmParams& p, const std::vector<LstmStepTrace>& steps,
                   const num::Vec& d_h_last, std::vector<num::Vec>* d_inputs = nullptr);

}  // namespace twinpp::model
