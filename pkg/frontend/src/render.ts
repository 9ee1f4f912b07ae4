// DOM rendering.  Full re-render from the current view on every frame;
// the scene is small enough that diffing would be ceremony.

import { isHighlighted } from './state.js'
import type { SceneObjectView, SessionView } from './types.js'

export interface Handlers {
  onObjectClick: (objectId: number) => void
}

const STATE_LABELS: Record<string, string> = {
  awaiting_instruction: 'Awaiting instruction',
  awaiting_confirmation: 'Awaiting your confirmation',
  ready_for_approval: 'Ready for approval',
  dispatching: 'Robot working…',
  assistant_pending: 'Assistant thinking…',
}

function el(id: string): HTMLElement {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node
}

function formatElapsed(seconds: number): string {
  const total = Math.max(0, Math.floor(seconds))
  const minutes = Math.floor(total / 60)
  const rest = total % 60
  return `${minutes}:${String(rest).padStart(2, '0')}`
}

function renderTimeBar(view: SessionView): void {
  el('time-label').textContent = formatElapsed(view.elapsedS)
  const fill = el('time-fill')
  // one full bar per 25-minute working session
  const fraction = Math.min(1, view.elapsedS / (25 * 60))
  fill.style.width = `${(fraction * 100).toFixed(1)}%`
  el('state-label').textContent = STATE_LABELS[view.state] ?? view.state
}

function renderTranscript(view: SessionView): void {
  const area = el('messages')
  area.replaceChildren(
    ...view.transcript.map((entry) => {
      const row = document.createElement('div')
      row.className = `message ${entry.speaker}`
      row.textContent = entry.text
      return row
    }),
  )
  area.scrollTop = area.scrollHeight
}

function renderBadges(view: SessionView): void {
  const badges = el('badges')
  const parts: string[] = []
  if (view.pendingSelections.target !== undefined) {
    parts.push(`target: ${view.pendingSelections.target}`)
  }
  if (view.pendingSelections.destination !== undefined) {
    parts.push(`destination: ${view.pendingSelections.destination}`)
  }
  badges.replaceChildren(
    ...parts.map((text) => {
      const badge = document.createElement('span')
      badge.className = 'badge'
      badge.textContent = text
      return badge
    }),
  )
}

function objectNode(
  object: SceneObjectView,
  view: SessionView,
  now: number,
  handlers: Handlers,
): HTMLElement {
  const node = document.createElement('div')
  node.classList.add(object.kind)
  node.dataset.objectId = String(object.id)
  if (object.kind === 'stud') {
    node.classList.add(object.destination ? 'destination' : 'plain')
  }
  if (isHighlighted(view, object.id, now)) {
    node.classList.add('highlight')
  }
  const label = document.createElement('span')
  label.textContent = String(object.id)
  node.appendChild(label)
  node.addEventListener('click', () => handlers.onObjectClick(object.id))
  return node
}

function renderScene(view: SessionView, now: number, handlers: Handlers): void {
  const wall = el('stud-row')
  const rack = el('panel-rack')
  const studs = view.scene
    .filter((o) => o.kind === 'stud')
    .sort((a, b) => a.id - b.id)
  const panels = view.scene
    .filter((o) => o.kind === 'panel')
    .sort((a, b) => a.id - b.id)
  const byId = new Map(panels.map((p) => [p.id, p]))

  wall.replaceChildren(
    ...studs.map((stud) => {
      const slot = document.createElement('div')
      slot.className = 'stud-slot'
      const studNode = objectNode(stud, view, now, handlers)
      slot.appendChild(studNode)
      if (stud.occupied_by !== null) {
        const panel = byId.get(stud.occupied_by)
        if (panel) {
          const installed = objectNode(panel, view, now, handlers)
          installed.classList.add('installed')
          slot.appendChild(installed)
        }
      }
      return slot
    }),
  )
  rack.replaceChildren(
    ...panels
      .filter((panel) => panel.installed_on === null)
      .map((panel) => {
        const node = objectNode(panel, view, now, handlers)
        if (panel.size_ft) {
          node.classList.add(panel.size_ft[1] <= 4 ? 'half-height' : 'full-height')
        }
        return node
      }),
  )
}

function renderControls(view: SessionView): void {
  const approveButton = el('approve') as HTMLButtonElement
  approveButton.disabled = !view.approveEnabled
  const input = el('utterance') as HTMLInputElement
  const sendButton = el('send') as HTMLButtonElement
  input.disabled = view.busy
  sendButton.disabled = view.busy
  el('robot-phase').textContent = view.robotPhase ? `robot: ${view.robotPhase}` : ''
}

function renderNotices(view: SessionView): void {
  el('notices').replaceChildren(
    ...view.notices.map((text) => {
      const toast = document.createElement('div')
      toast.className = 'toast'
      toast.textContent = text
      return toast
    }),
  )
}

export function render(view: SessionView, now: number, handlers: Handlers): void {
  renderTimeBar(view)
  renderTranscript(view)
  renderBadges(view)
  renderScene(view, now, handlers)
  renderControls(view)
  renderNotices(view)
}
