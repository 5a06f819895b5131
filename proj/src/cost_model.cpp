// SPDX-License-Identifier: Apache-2.0
#include "smoothread/cost_model.hpp"

#include "smoothread/error.hpp"

#include <cmath>

namespace smoothread::cost_model {

void CostParams::validate() const {
    const double fields[] = {p_r, beta, g, c, l, quad_a, quad_b};
    for (double v : fields) {
        if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::InvalidParams, "cost parameters must be finite and >= 0");
    }
    if (c < 1.0) throw Error(ErrorCode::InvalidParams, "chunk size c must be >= 1");
}

double time_recurrent_sr(const CostParams& p) {
    p.validate();
    return (1.0 + p.g * p.beta / p.c) * p.l * p.p_r;
}

double time_recurrent_sr_sum(const CostParams& p) {
    p.validate();
    const double n = p.l / p.c;
    return n * p.c * p.p_r + n * p.g * p.beta * p.p_r;
}

double time_self_attn_os(const CostParams& p) {
    p.validate();
    return p.quad_a * p.l * p.l + p.quad_b * p.l + p.g * (p.quad_b + 2.0 * p.quad_a * p.l);
}

std::optional<double> crossover_length(const CostParams& p) {
    p.validate();
    // T_OS - T_SR = a l^2 + B l + C
    const double k = (1.0 + p.g * p.beta / p.c) * p.p_r;
    const double a = p.quad_a;
    const double b = p.quad_b + 2.0 * p.quad_a * p.g - k;
    const double c0 = p.g * p.quad_b;
    if (a == 0.0) {
        if (b > 0.0) return std::max(0.0, -c0 / b);
        if (b == 0.0 && c0 > 0.0) return 0.0;
        return std::nullopt;
    }
    const double disc = b * b - 4.0 * a * c0;
    if (disc < 0.0) return 0.0;
    const double sq = std::sqrt(disc);
    // Larger root, in the cancellation-free form.
    const double root = b < 0.0 ? (-b + sq) / (2.0 * a) : (2.0 * c0) / (-b - sq);
    if (!std::isfinite(root) || root < 0.0) return 0.0;
    return root;
}

CostParams params_from_trace(const engine::InferenceTrace& trace, double p_r, double beta) {
    std::size_t n = 0;
    for (const auto& s : trace.steps) {
        if (s.chunk_index) ++n;
    }
    if (n == 0) throw Error(ErrorCode::IncompatibleTrace, "trace has no chunk steps");
    CostParams p;
    p.p_r = p_r;
    p.beta = beta;
    p.l = static_cast<double>(trace.total_prefill_tokens);
    p.g = static_cast<double>(trace.total_decode_tokens) / static_cast<double>(n);
    p.c = std::max(1.0, p.l / static_cast<double>(n));
    return p;
}

double validate_against_trace(const engine::InferenceTrace& trace, const CostParams& params) {
    if (trace.strategy != engine::Strategy::Smooth)
        throw Error(ErrorCode::IncompatibleTrace, "the recurrent time model describes Smooth Reading traces only");
    if (trace.backend != "sim-swa" && trace.backend != "sim-attn")
        throw Error(ErrorCode::IncompatibleTrace, "trace from backend '" + trace.backend + "' has no virtual clock");
    if (!(trace.virtual_time_seconds > 0.0)) throw Error(ErrorCode::IncompatibleTrace, "trace has zero virtual time");
    const double analytic = time_recurrent_sr(params);
    return std::abs(analytic - trace.virtual_time_seconds) / trace.virtual_time_seconds;
}

MrProfile mr_profile(engine::Strategy strategy, double c, double l, double g) {
    switch (strategy) {
        case engine::Strategy::OneStep: return {l + g, l + g};
        case engine::Strategy::Unsmooth: return {3.0 * c, 3.0 * c};
        case engine::Strategy::Smooth: return {c + g, c + g};
    }
    return {};
}

QuadFit fit_self_attention(double l1, double t1, double l2, double t2) {
    const double det = l1 * l2 * (l1 - l2);
    if (det == 0.0) throw Error(ErrorCode::InvalidParams, "need two distinct non-zero lengths");
    QuadFit f;
    f.quad_a = (t1 * l2 - t2 * l1) / det;
    f.quad_b = (l1 * l1 * t2 - l2 * l2 * t1) / det;
    return f;
}

std::vector<CostRow> cost_table(const CostParams& p, const std::vector<double>& lengths) {
    std::vector<CostRow> rows;
    rows.reserve(lengths.size());
    for (double l : lengths) {
        CostParams q = p;
        q.l = l;
        rows.push_back({l, time_recurrent_sr(q), time_self_attn_os(q)});
    }
    return rows;
}

}  // namespace smoothread::cost_model
