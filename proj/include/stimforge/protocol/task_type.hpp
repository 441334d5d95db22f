#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace stimforge::protocol {

/// Every task type a flow step can select. The declaration order is the
/// ordinal used by the marker ID table; append new types at the end.
enum class TaskType : int {
  FixationHorizontal,
  FixationVertical,
  FixationRandom,
  PursuitConstant,
  PursuitAccelerating,
  PursuitRandom,
  PursuitCircular,
  PursuitWandering,
  NBackLetter,
  NBackShape,
  NBackSound,
  StroopSimple,
  StroopComplex,
  StroopFast,
  ArrowEasy,
  ArrowMedium,
  ArrowHard,
  BlinkLong,
  BlinkShort,
  Slippage,
  ContentText,
  ContentImage,
  ContentVideo,
  Vergence,
  Calibration1,
  Calibration3,
  Calibration5,
  Calibration9,
  Validation,
  QuestionnaireDemographics,
  QuestionnaireNasaTlx,
  QuestionnaireBfi10,
  QuestionnaireCustom,
  Break,
};

enum class TaskFamily {
  Fixation,
  Pursuit,
  NBack,
  Stroop,
  Arrow,
  Blink,
  Slippage,
  Content,
  Vergence,
  Calibration,
  Questionnaire,
  Break,
};

std::span<const TaskType> all_task_types();

/// Wire name as used in flow files, e.g. "fixation-horizontal".
std::string_view to_string(TaskType type);
std::optional<TaskType> task_type_from_string(std::string_view name);

/// Display name written to the event log's taskName, e.g. "HorizontalFixation".
std::string_view task_name(TaskType type);

TaskFamily family_of(TaskType type);
std::string_view to_string(TaskFamily family);

/// Task types whose stimulus sequence depends on a seed.
bool is_stochastic(TaskType type);

/// Task types that show start/end fiducial markers. Questionnaires and
/// breaks present no stimuli and carry none.
bool carries_markers(TaskType type);

}  // namespace stimforge::protocol
