#include "stimforge/protocol/task_type.hpp"

#include <array>

namespace stimforge::protocol {
namespace {

struct TaskInfo {
  TaskType type;
  std::string_view wire;
  std::string_view display;
  TaskFamily family;
  bool stochastic;
};

constexpr std::array kTasks = {
    TaskInfo{TaskType::FixationHorizontal, "fixation-horizontal", "HorizontalFixation", TaskFamily::Fixation, false},
    TaskInfo{TaskType::FixationVertical, "fixation-vertical", "VerticalFixation", TaskFamily::Fixation, false},
    TaskInfo{TaskType::FixationRandom, "fixation-random", "RandomFixation", TaskFamily::Fixation, true},
    TaskInfo{TaskType::PursuitConstant, "pursuit-constant", "ConstantPursuit", TaskFamily::Pursuit, false},
    TaskInfo{TaskType::PursuitAccelerating, "pursuit-accelerating", "AcceleratingPursuit", TaskFamily::Pursuit, false},
    TaskInfo{TaskType::PursuitRandom, "pursuit-random", "RandomPursuit", TaskFamily::Pursuit, true},
    TaskInfo{TaskType::PursuitCircular, "pursuit-circular", "CircularPursuit", TaskFamily::Pursuit, false},
    TaskInfo{TaskType::PursuitWandering, "pursuit-wandering", "WanderingPursuit", TaskFamily::Pursuit, true},
    TaskInfo{TaskType::NBackLetter, "nback-letter", "LetterNBack", TaskFamily::NBack, true},
    TaskInfo{TaskType::NBackShape, "nback-shape", "ShapeNBack", TaskFamily::NBack, true},
    TaskInfo{TaskType::NBackSound, "nback-sound", "SoundNBack", TaskFamily::NBack, true},
    TaskInfo{TaskType::StroopSimple, "stroop-simple", "SimpleStroop", TaskFamily::Stroop, true},
    TaskInfo{TaskType::StroopComplex, "stroop-complex", "ComplexStroop", TaskFamily::Stroop, true},
    TaskInfo{TaskType::StroopFast, "stroop-fast", "FastStroop", TaskFamily::Stroop, true},
    TaskInfo{TaskType::ArrowEasy, "arrow-easy", "EasyArrowTracking", TaskFamily::Arrow, true},
    TaskInfo{TaskType::ArrowMedium, "arrow-medium", "MediumArrowTracking", TaskFamily::Arrow, true},
    TaskInfo{TaskType::ArrowHard, "arrow-hard", "HardArrowTracking", TaskFamily::Arrow, true},
    TaskInfo{TaskType::BlinkLong, "blink-long", "LongIntervalBlink", TaskFamily::Blink, false},
    TaskInfo{TaskType::BlinkShort, "blink-short", "ShortIntervalBlink", TaskFamily::Blink, false},
    TaskInfo{TaskType::Slippage, "slippage", "Slippage", TaskFamily::Slippage, false},
    TaskInfo{TaskType::ContentText, "content-text", "TextContent", TaskFamily::Content, false},
    TaskInfo{TaskType::ContentImage, "content-image", "ImageContent", TaskFamily::Content, false},
    TaskInfo{TaskType::ContentVideo, "content-video", "VideoContent", TaskFamily::Content, false},
    TaskInfo{TaskType::Vergence, "vergence", "Vergence", TaskFamily::Vergence, false},
    TaskInfo{TaskType::Calibration1, "calibration-1", "Calibration1Point", TaskFamily::Calibration, false},
    TaskInfo{TaskType::Calibration3, "calibration-3", "Calibration3Point", TaskFamily::Calibration, false},
    TaskInfo{TaskType::Calibration5, "calibration-5", "Calibration5Point", TaskFamily::Calibration, false},
    TaskInfo{TaskType::Calibration9, "calibration-9", "Calibration9Point", TaskFamily::Calibration, false},
    TaskInfo{TaskType::Validation, "validation", "Validation", TaskFamily::Calibration, false},
    TaskInfo{TaskType::QuestionnaireDemographics, "questionnaire-demographics", "DemographicsQuestionnaire", TaskFamily::Questionnaire, false},
    TaskInfo{TaskType::QuestionnaireNasaTlx, "questionnaire-nasa-tlx", "NasaTlxQuestionnaire", TaskFamily::Questionnaire, false},
    TaskInfo{TaskType::QuestionnaireBfi10, "questionnaire-bfi10", "Bfi10Questionnaire", TaskFamily::Questionnaire, false},
    TaskInfo{TaskType::QuestionnaireCustom, "questionnaire-custom", "CustomQuestionnaire", TaskFamily::Questionnaire, false},
    TaskInfo{TaskType::Break, "break", "Break", TaskFamily::Break, false},
};

constexpr std::array<TaskType, kTasks.size()> make_type_list() {
  std::array<TaskType, kTasks.size()> out{};
  for (std::size_t i = 0; i < kTasks.size(); ++i) out[i] = kTasks[i].type;
  return out;
}

constexpr auto kTypeList = make_type_list();

const TaskInfo& info(TaskType type) { return kTasks[static_cast<std::size_t>(type)]; }

}  // namespace

std::span<const TaskType> all_task_types() { return kTypeList; }

std::string_view to_string(TaskType type) { return info(type).wire; }

std::optional<TaskType> task_type_from_string(std::string_view name) {
  for (const auto& t : kTasks) {
    if (t.wire == name) return t.type;
  }
  return std::nullopt;
}

std::string_view task_name(TaskType type) { return info(type).display; }

TaskFamily family_of(TaskType type) { return info(type).family; }

std::string_view to_string(TaskFamily family) {
  switch (family) {
    case TaskFamily::Fixation: return "fixation";
    case TaskFamily::Pursuit: return "pursuit";
    case TaskFamily::NBack: return "nback";
    case TaskFamily::Stroop: return "stroop";
    case TaskFamily::Arrow: return "arrow";
    case TaskFamily::Blink: return "blink";
    case TaskFamily::Slippage: return "slippage";
    case TaskFamily::Content: return "content";
    case TaskFamily::Vergence: return "vergence";
    case TaskFamily::Calibration: return "calibration";
    case TaskFamily::Questionnaire: return "questionnaire";
    case TaskFamily::Break: return "break";
  }
  return "unknown";
}

bool is_stochastic(TaskType type) { return info(type).stochastic; }

bool carries_markers(TaskType type) {
  const auto f = family_of(type);
  return f != TaskFamily::Questionnaire && f != TaskFamily::Break;
}

}  // namespace stimforge::protocol
