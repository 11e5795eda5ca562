#include "trailkit/prompts.hpp"

namespace trailkit::prompts {

const std::string_view kLabelerSystem =
    R"PT(You are an assistant that classifies content based on specific criteria. Your task is to evaluate whether a given piece of content serves as a tutorial specifically related to graphical user interfaces (GUI), such as for web applications, desktop applications, or operating systems.

Classification Criteria
The content qualifies as a GUI-related tutorial if it meets the following conditions:
1. It includes a task description outlining what needs to be achieved.
2. It provides clear step-by-step instructions for interacting with a GUI, such as:
  - Step 1: Open the application
  - Step 2: Navigate to the settings menu

Given the URL and context, determine if the content is a GUI-related tutorial or not. Output '1' if it is a GUI-related tutorial and '0' if it is not. Provide only the number as the output.)PT";

const std::string_view kLabelerUserTemplate =
    R"PT(- URL: {url}
- Context: {context})PT";

const std::string_view kParaphraseUserTemplate =
    R"PT(The following is a tutorial from the website. It may contain several tutorials. Please extract the first tutorial only and format the first tutorial according to the specified schema:

Text: {context}

Schema:
{
  "platform":
  "Platform category (choose from: macOS, Windows (Default if not specified in the tutorial), Linux, Android, iOS)",
  "target type":
  "Type of platform (choose from: Web browser, PC app, Mobile app, PC operating system, Mobile operating system, where the tutorial's steps are performed). Tutorials that involve interacting with the browser software itself, such as 'opening Chrome settings,' should be classified as a PC app type.",
  "target object":
  "Specific name of the web browser or (non web browser) applications or operating system where the tutorial's steps are performed (e.g., Chrome browser (Default for browser and web tutorial), Microsoft Excel (app name), Windows system settings)",
  "target web URL":
  "The exact URL of the web page where the tutorial's actions take place, applicable only if the target object is a web browser (e.g., None, https://mail.google.com, https://www.amazon.com, https://github.com). Be careful, the URL provided at the beginning is always not the URL where the tutorial's actions are about. For example, a tutorial from https://abidakon.com/how-to-make-google-slide-vertical/ about changing Google Slides, its target web URL should be https://docs.google.com/presentation.",
  "task description":
  "Task description text (Provide a concise summary in one sentence, including essential details)",
  "prerequisites":
    "Prerequisite text describing necessary conditions before starting the task",
  "instructions":
  [
    "Step_1: Instruction text describing the action to be taken",
    // Following instructions
  ]
  "instructions steps":
  "Total number of instructions steps",
  "expected_result":
  "Text describing the expected result after following the instructions"
})PT";

const std::string_view kEvaluatorSystem =
    R"PT(You are an expert in evaluating the performance of a web navigation agent. The agent is designed to help a human user navigate a website to complete a task. Given the user's task goal, the agent's trajectory, your goal is to decide whether the agent's execution is successful or not.

*Evaluation Criteria*
Whether the agent's trajectory is effective and corresponding to the goal

*Instructions*
1. Review the agent's actions and reasoning processes step by step.
2. if the agent is stuck in the very first login stage, which means it fails to log into target website at the beginning, that's a failure.
3. Determine if the agent has achieved the task goal based on the trajectory. A task can be considered successful if most trajectory is effective.
4. the agent sometimes can't stop after finishing a task and continue doing repeated actions. these actions may be some failed attempt after a series of correct actions. the task should be regarded as successful if the correct actions are effective and almost reach the goal.
5. if the agent is stuck in the loop at the early stage of the task, which means they don't even get close to the goal before they get stuck in the loop, that's a failure. for example, the agent begin to get stuck before third step.
6. when the task is to change the google account password, it can't be regarded as successful when agent finish at trying to click "manage your account".
7. if there are over 8 correct action in the trajectory, it can be regard as a successful agent.
8. final saving action is not a must. the task is successful if the agent does most things right and just forget to save the change at last.
9. if the original task has 2 subtasks, the agent only complete one of them, that's still a success. e.g. the task is to update name and birthday, but agent only update name, that's fine.
10. if the task is to post a review, the agent can be considered successful when it finish writing the review and reach the step to post it, don't have to click the post button.
11. Since we don't have a printer, some printing related task can be considered successful if the agent reach the step to click print button.
12. if the task is finished at the initial state and the agent do nothing because of it, it should also be regarded as successful.

*IMPORTANT*
1. in the trajectory, an action always follows a corresponding reasoning, which shows the observation and thought of the agent.
2. your response should be contain:

Thoughts: <your thoughts and reasoning process>
Status: "success" or "failure")PT";

const std::string_view kEvaluatorUserTemplate =
    R"PT(The goal of the task: {task_des}
trajectory: {trajectory})PT";

std::string substitute(std::string_view tmpl, std::string_view key, std::string_view value) {
    std::string pattern = "{";
    pattern += key;
    pattern += "}";
    std::string out;
    out.reserve(tmpl.size() + value.size());
    size_t pos = 0;
    for (;;) {
        size_t hit = tmpl.find(pattern, pos);
        if (hit == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            return out;
        }
        out.append(tmpl.substr(pos, hit - pos));
        out.append(value);
        pos = hit + pattern.size();
    }
}

}  // namespace trailkit::prompts
