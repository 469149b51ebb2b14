#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixlap/analysis.hpp"
#include "mixlap/errors.hpp"
#include "mixlap/helmholtz.hpp"

namespace mixlap {

using OrderedJson = nlohmann::ordered_json;

inline OrderedJson to_json(const HypothesisReport& h) {
    OrderedJson j;
    j["pass"] = h.all_pass();
    j["form_hypotheses_pass"] = h.form_hypotheses_ok();
    j["hyp1_ok"] = h.hyp1_ok;
    j["gamma_connected"] = h.gamma_connected;
    j["gammac_connected"] = h.gammac_connected;
    j["quadrant_ok_gamma"] = h.quadrant_ok_gamma;
    j["quadrant_ok_gammac"] = h.quadrant_ok_gammac;
    j["transition_angles"] = h.transition_angles;
    j["max_transition_angle"] = h.max_transition_angle;
    j["transition_angles_ok"] = h.transition_angles_ok;
    j["reflex_corner_present"] = h.reflex_corner_present;
    j["rotation_applied"] = h.rotation_applied;
    j["witness_count"] = h.witnesses.size();
    OrderedJson ws = OrderedJson::array();
    const std::size_t cap = 16;
    for (std::size_t i = 0; i < h.witnesses.size() && i < cap; ++i) {
        const HypothesisWitness& w = h.witnesses[i];
        ws.push_back({{"arc", w.arc},
                      {"t", w.parameter},
                      {"normal", {w.normal.x, w.normal.y}},
                      {"condition", w.condition}});
    }
    j["witnesses"] = std::move(ws);
    j["witnesses_truncated"] = h.witnesses.size() > cap;
    return j;
}

inline OrderedJson to_json(const MonotonicityReport& m) {
    OrderedJson j;
    j["min_dx"] = m.min_dx;
    j["min_dy"] = m.min_dy;
    j["threshold"] = m.threshold;
    j["offending_count"] = m.offending_triangles.size();
    OrderedJson off = OrderedJson::array();
    const std::size_t cap = 32;
    for (std::size_t i = 0; i < m.offending_triangles.size() && i < cap; ++i)
        off.push_back(m.offending_triangles[i]);
    j["offending_triangles"] = std::move(off);
    return j;
}

inline OrderedJson to_json(const HotspotReport& h) {
    OrderedJson j;
    j["argmax_node"] = h.argmax_node;
    j["argmax_point"] = {h.argmax_point.x, h.argmax_point.y};
    j["max_value"] = h.max_value;
    j["on_gamma"] = h.on_gamma;
    j["corner_p_present"] = h.corner_p.has_value();
    if (h.corner_p) {
        j["corner_p"] = {h.corner_p->x, h.corner_p->y};
        j["distance_to_p"] = *h.distance_to_p;
    }
    return j;
}

inline OrderedJson to_json(const MinimizerReport& m) {
    OrderedJson j;
    j["eta1"] = m.eta1;
    j["lambda_gamma"] = m.lambda_gamma;
    j["lambda_gammac"] = m.lambda_gammac;
    j["cos_grad_psi"] = m.cos_grad_psi;
    j["cos_perp_grad_phi"] = m.cos_perp_grad_phi;
    j["gammac_attains"] = m.gammac_attains;
    j["near_degenerate"] = m.near_degenerate;
    return j;
}

inline OrderedJson to_json(const LevelData& lv) {
    OrderedJson j;
    j["h"] = lv.h;
    j["nodes"] = lv.nodes;
    j["triangles"] = lv.triangles;
    j["min_angle_deg"] = lv.min_angle_deg;
    j["lambda_gamma"] = lv.lambda_gamma;
    j["lambda_gammac"] = lv.lambda_gammac;
    j["eta1"] = lv.eta1;
    j["union_mismatch"] = lv.union_mismatch;
    j["form_gap"] = lv.form_gap;
    j["kernel_dim"] = lv.kernel_dim;
    j["monotonicity"] = to_json(lv.monotonicity);
    j["hotspot"] = to_json(lv.hotspot);
    j["minimizer"] = to_json(lv.minimizer);
    return j;
}

inline OrderedJson to_json(const TheoremReport& r) {
    OrderedJson j;
    j["domain"] = r.domain_id;
    j["rotation_found"] = r.rotation_found;
    j["rotation"] = r.rotation;
    j["hypotheses"] = to_json(r.hypotheses);
    OrderedJson levels = OrderedJson::array();
    for (const LevelData& lv : r.levels) levels.push_back(to_json(lv));
    j["levels"] = std::move(levels);
    j["lambda_gamma_extrapolated"] = r.lambda_gamma_extrapolated;
    j["lambda_gammac_extrapolated"] = r.lambda_gammac_extrapolated;
    j["observed_rate"] = r.observed_rate;
    j["inequality_margin"] = r.inequality_margin;
    j["drift"] = r.drift;
    OrderedJson verdicts;
    verdicts["inequality"] = to_string(r.inequality);
    verdicts["spectral_union"] = to_string(r.spectral_union);
    verdicts["monotonicity"] = to_string(r.monotonicity);
    verdicts["hotspot"] = to_string(r.hotspot);
    j["verdicts"] = std::move(verdicts);
    j["error"] = r.error;
    return j;
}

inline OrderedJson to_json(const ScalarEigenResult& r, const Mesh& mesh) {
    OrderedJson j;
    j["dirichlet_part"] = to_string(r.dirichlet_part);
    j["eigenvalues"] = r.eigenvalues;
    j["residuals"] = r.residuals;
    j["iterations"] = r.iterations;
    j["nodes"] = mesh.node_count();
    j["triangles"] = mesh.triangle_count();
    return j;
}

inline OrderedJson to_json(const VectorEigenResult& r) {
    OrderedJson j;
    j["form"] = r.form == VectorForm::Curvature ? "curvature" : "divcurl";
    j["eigenvalues"] = r.eigenvalues;
    j["residuals"] = r.residuals;
    j["iterations"] = r.iterations;
    j["kernel_dim"] = r.kernel_dim;
    j["kernel_threshold"] = r.kernel_threshold;
    return j;
}

inline OrderedJson to_json(const DecompositionResult& r) {
    OrderedJson j;
    j["norm_input"] = r.norm_input;
    j["norm_grad_psi"] = r.norm_grad_psi;
    j["norm_perp_grad_phi"] = r.norm_perp_grad_phi;
    j["norm_residual"] = r.norm_residual;
    const double l = r.norm_input > 0.0 ? r.norm_residual / r.norm_input : 0.0;
    j["residual_fraction"] = l;
    return j;
}

inline void write_json(const OrderedJson& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
}

} // namespace mixlap
