"""Score the incorrect-instruction corpus with the deterministic assistant.

Run from the repository root:

    python demos/detection_report.py
"""

from hrc import RuleAssistant, eval_corpus, load_corpus_file, load_scene_file

scene = load_scene_file("scenes/drywall_fig9.json")
corpus = load_corpus_file("corpora/incorrect_instructions.yaml")

report = eval_corpus(corpus, scene, lambda s: RuleAssistant())
print(report.to_text())

print("\nsample rejections:")
for result in report.results[:3]:
    robot_lines = [e.text for e in result.transcript if e.speaker == "robot"]
    print(f"  {result.name}: {robot_lines[-1]}")
