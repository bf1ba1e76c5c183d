#include "rtcode/system.hpp"

namespace rtcode {

namespace {

void require_kind(const nlohmann::json& doc, const std::string& kind) {
  if (doc.value("kind", std::string{}) != kind)
    throw SpecError("policy document: expected kind \"" + kind + "\"");
}

}  // namespace

nlohmann::json encoder_to_json(const TrackingEncoder& enc) {
  nlohmann::json doc;
  doc["kind"] = "tracking_deterministic";
  doc["table"] = enc.table;
  return doc;
}

nlohmann::json encoder_to_json(const StochasticEncoder& enc) {
  nlohmann::json doc;
  doc["kind"] = "tracking_stochastic";
  doc["prob"] = enc.prob;
  return doc;
}

nlohmann::json encoder_to_json(const FullHistoryEncoder& enc) {
  nlohmann::json doc;
  doc["kind"] = "full_history_deterministic";
  doc["horizon"] = enc.horizon;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [key, y] : enc.table)
    entries.push_back({{"prefix", key}, {"y", y}});
  doc["table"] = std::move(entries);
  return doc;
}

nlohmann::json encoder_to_json(const InfiniteTrackingEncoder& enc) {
  nlohmann::json doc;
  doc["kind"] = "tracking_infinite";
  doc["horizon"] = enc.horizon;
  doc["y_size"] = enc.y_size;
  doc["table"] = enc.table;
  return doc;
}

TrackingEncoder tracking_encoder_from_json(const nlohmann::json& doc) {
  require_kind(doc, "tracking_deterministic");
  return {doc.at("table").get<IntCube>()};
}

StochasticEncoder stochastic_encoder_from_json(const nlohmann::json& doc) {
  require_kind(doc, "tracking_stochastic");
  StochasticEncoder enc;
  enc.prob = doc.at("prob")
                 .get<std::vector<std::vector<std::vector<Vec>>>>();
  return enc;
}

FullHistoryEncoder full_history_encoder_from_json(const nlohmann::json& doc) {
  require_kind(doc, "full_history_deterministic");
  FullHistoryEncoder enc;
  enc.horizon = doc.at("horizon").get<int>();
  for (const auto& entry : doc.at("table"))
    enc.table[entry.at("prefix").get<std::vector<int>>()] =
        entry.at("y").get<int>();
  return enc;
}

InfiniteTrackingEncoder infinite_encoder_from_json(const nlohmann::json& doc) {
  require_kind(doc, "tracking_infinite");
  InfiniteTrackingEncoder enc;
  enc.horizon = doc.at("horizon").get<int>();
  enc.y_size = doc.at("y_size").get<int>();
  enc.table = doc.at("table").get<IntCube>();
  return enc;
}

nlohmann::json decoder_to_json(const DecoderPolicy& dec) {
  nlohmann::json doc;
  doc["kind"] = "decoder";
  doc["next_state"] = dec.next_state;
  doc["reproduction"] = dec.reproduction;
  return doc;
}

nlohmann::json decoder_to_json(const SiDecoderPolicy& dec) {
  nlohmann::json doc;
  doc["kind"] = "si_decoder";
  doc["next_state"] = dec.next_state;
  doc["reproduction"] = dec.reproduction;
  doc["si_next_state"] = dec.si_next_state;
  return doc;
}

DecoderPolicy decoder_from_json(const nlohmann::json& doc) {
  require_kind(doc, "decoder");
  DecoderPolicy dec;
  dec.next_state = doc.at("next_state").get<IntCube>();
  dec.reproduction = doc.at("reproduction").get<IntCube>();
  return dec;
}

SiDecoderPolicy si_decoder_from_json(const nlohmann::json& doc) {
  require_kind(doc, "si_decoder");
  SiDecoderPolicy dec;
  dec.next_state = doc.at("next_state").get<IntCube>();
  dec.reproduction =
      doc.at("reproduction").get<std::vector<IntHyperCube>>();
  dec.si_next_state = doc.at("si_next_state").get<IntHyperCube>();
  return dec;
}

}  // namespace rtcode
