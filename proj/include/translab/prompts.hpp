#pragma once

#include <map>
#include <string>

namespace translab {

// Fixed prompt text shared by both orchestration modes. Bundles are immutable
// and addressed by id so configs can pin exactly which wording a run used.
struct PromptBundle {
    std::string id;
    std::string system_text;
    std::string task_template;    // placeholders: {program_id}, {source}, {entry}
    std::string repair_template;  // placeholders: {stage}, {stderr}
};

const PromptBundle& prompt_bundle(const std::string& id);

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values);

}  // namespace translab
