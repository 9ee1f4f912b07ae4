"""Speech-style session: every reference is spoken, ids and area phrases.

Run from the repository root:

    python demos/speech_session.py
"""

from hrc import DialogueSession, RuleAssistant, load_scene_file
from hrc.robot import RobotSimulator, encode, execute_task

scene = load_scene_file("scenes/drywall_fig9.json")
session = DialogueSession(scene, RuleAssistant())
robot = RobotSimulator(on_event=lambda e: print(f"    [robot] {e.phase.value}: {e.detail}"))


def say(text):
    print(f"[user]  {text!r}")
    reply = session.submit(text)
    print(f"[robot] {reply.text}")
    return reply


def approve():
    task = session.approve()
    print(f"[user]  *clicks Approve* -> {encode(task)}")
    execute_task(session, robot, task)


# A full install driven by an area phrase instead of a stud id.
say("Please place panel 504 in the second rightmost position")
say("yes")
approve()

# A blank message only re-asks; nothing is lost.
say("")

# Reusing an installed panel is refused with the open alternatives.
say("Please place panel 504 on stud 605")
# A plain framing stud is refused as a destination outright.
say("Please place panel 501 on stud 605")
say("Please place panel 501 on stud 602")
say("it's correct")
approve()

# Finish the wall.
say("Panel 502 to stud 604")
say("yes")
approve()
say("Okay, robot, could you please pick up panel 503 and install it at the "
    "rightmost portion of the framing?")
say("yes")
approve()

print("\nfinal placement:")
for panel in session.scene.panels():
    print(f"  panel {panel.id} -> stud {panel.installed_on}")
