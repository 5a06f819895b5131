// SPDX-License-Identifier: Apache-2.0
//
// Analytic inference time for recurrent Smooth Reading,
//
//   T_SR = (1 + g * beta / c) * l * p_r,
//
// which is linear in the context length l, against a quadratic model of
// One-Step self-attention,
//
//   T_OS = a * l^2 + b * l + g * (b + 2 * a * l),
//
// where every decoded token is charged the attention cost at the end of the
// context.
#pragma once

#include "smoothread/engine.hpp"

#include <optional>
#include <vector>

namespace smoothread::cost_model {

struct CostParams {
    double p_r = 0.0;     // seconds per prefilled token
    double beta = 1.0;    // decode / prefill cost ratio
    double g = 0.0;       // tokens decoded per step
    double c = 1.0;       // chunk tokens
    double l = 0.0;       // context tokens
    double quad_a = 0.0;  // seconds per token^2
    double quad_b = 0.0;  // seconds per token

    // Throws InvalidParams for negative or non-finite fields or c < 1.
    void validate() const;
};

double time_recurrent_sr(const CostParams& p);
double time_self_attn_os(const CostParams& p);

// n * c * p_r + n * g * beta * p_r with n = l / c; algebraically equal to
// time_recurrent_sr.
double time_recurrent_sr_sum(const CostParams& p);

// Length beyond which One-Step self-attention stays slower than Smooth
// Reading, i.e. the largest root of T_OS - T_SR; 0 when attention is slower
// at every length, nullopt when it never is for large l.
std::optional<double> crossover_length(const CostParams& p);

// Parameters that reproduce a Smooth Reading trace from a constant-cost
// simulator exactly: l is the total prefill, n the number of chunk steps, g the
// mean decode per chunk step and c = l / n.
CostParams params_from_trace(const engine::InferenceTrace& trace, double p_r, double beta);

// |analytic - trace.virtual_time| / trace.virtual_time. Throws
// IncompatibleTrace for a non-Smooth trace, a remote backend or a zero-time
// trace.
double validate_against_trace(const engine::InferenceTrace& trace, const CostParams& params);

struct MrProfile {
    double peak_mr = 0.0;
    double per_step_bound = 0.0;
};

// OneStep: l + g; Unsmooth: 3c; Smooth: c + g.
MrProfile mr_profile(engine::Strategy strategy, double c, double l, double g);

struct QuadFit {
    double quad_a = 0.0;
    double quad_b = 0.0;
};

// Solves a*l^2 + b*l = t through two (l, t) readings; throws InvalidParams when
// the lengths coincide or are zero.
QuadFit fit_self_attention(double l1, double t1, double l2, double t2);

struct CostRow {
    double l = 0.0;
    double t_sr = 0.0;
    double t_os = 0.0;
};

// Both models evaluated at each length.
std::vector<CostRow> cost_table(const CostParams& p, const std::vector<double>& lengths);

}  // namespace smoothread::cost_model
