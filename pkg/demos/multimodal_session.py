"""Multimodal session: pointing selections fused with short spoken commands.

Run from the repository root:

    python demos/multimodal_session.py
"""

from hrc import DialogueSession, RuleAssistant, load_scene_file
from hrc.fusion import NonInteractableError
from hrc.robot import RobotSimulator, execute_task

scene = load_scene_file("scenes/drywall_fig9.json")
session = DialogueSession(scene, RuleAssistant())
robot = RobotSimulator()


def point(object_id):
    try:
        highlight = session.select(object_id)
        print(f"[user]  *points at {object_id}*  (highlight: {highlight.role.value})")
    except NonInteractableError as exc:
        print(f"[user]  *points at {object_id}*  -> rejected: {exc}")


def say(text):
    print(f"[user]  {text!r}")
    reply = session.submit(text)
    print(f"[robot] {reply.text}")


def approve():
    print("[user]  *clicks Approve*")
    execute_task(session, robot, session.approve())


# "install this here" is three words; the pointing supplies both ids.
point(501)
point(602)
say("install this here")
say("yes")
approve()

# Plain framing studs are not valid destinations and refuse the selection.
point(605)

# Pointing alone works too: an empty send carries just the fused clauses.
point(504)
point(606)
say("")
say("yes")
approve()

# Saying one panel while pointing at another is duplicate information.
point(503)
say("install panel 502 here")

# Finish with a mix of pointing and speech.
point(502)
point(604)
say("Please place this panel at this stud")
say("yes")
approve()
say("Panel 503 to stud 608")
say("yes")
approve()

print("\nfinal placement:")
for panel in session.scene.panels():
    print(f"  panel {panel.id} -> stud {panel.installed_on}")
