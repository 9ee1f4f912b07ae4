// Pure view-state transitions.  Every field of the view is traceable to
// a server frame (or a GET /session payload); there are no optimistic
// updates.  Approve enablement in particular comes only from state
// frames, so the button can never arm ahead of the server.

import type { EventFrame, SessionView, TranscriptEntry } from './types.js'

export const HIGHLIGHT_MS = 1200

const BUSY_STATES = new Set(['dispatching', 'assistant_pending'])

export function initialView(sessionId: string): SessionView {
  return {
    sessionId,
    state: 'awaiting_instruction',
    approveEnabled: false,
    pendingTask: null,
    pendingSelections: {},
    elapsedS: 0,
    scene: [],
    transcript: [],
    highlights: {},
    robotPhase: null,
    notices: [],
    busy: false,
  }
}

export function reduceFrame(view: SessionView, frame: EventFrame, now: number): SessionView {
  switch (frame.type) {
    case 'state':
      return {
        ...view,
        state: frame.state,
        approveEnabled: frame.approve_enabled,
        pendingTask: frame.pending_task,
        pendingSelections: frame.pending_selections,
        elapsedS: frame.elapsed_s,
        scene: frame.scene.objects,
        busy: BUSY_STATES.has(frame.state),
      }
    case 'reply': {
      const entry: TranscriptEntry = { speaker: 'robot', text: frame.text }
      const last = view.transcript[view.transcript.length - 1]
      if (last && last.speaker === 'robot' && last.text === frame.text) {
        return view
      }
      return { ...view, transcript: [...view.transcript, entry] }
    }
    case 'highlight':
      return {
        ...view,
        highlights: { ...view.highlights, [frame.object_id]: now + HIGHLIGHT_MS },
      }
    case 'robot': {
      const next: SessionView = { ...view, robotPhase: frame.phase }
      if (frame.phase === 'failed') {
        next.notices = [...view.notices, `Task failed: ${frame.detail}`]
      } else if (frame.phase === 'done') {
        next.notices = [
          ...view.notices,
          `Panel ${frame.target_id} installed on stud ${frame.destination_id}`,
        ]
      }
      return next
    }
  }
}

/** Replace the transcript with the server's canonical list (GET /session). */
export function setTranscript(view: SessionView, entries: TranscriptEntry[]): SessionView {
  return { ...view, transcript: entries }
}

export function expireHighlights(view: SessionView, now: number): SessionView {
  const live: Record<number, number> = {}
  let changed = false
  for (const [id, until] of Object.entries(view.highlights)) {
    if (until > now) {
      live[Number(id)] = until
    } else {
      changed = true
    }
  }
  return changed ? { ...view, highlights: live } : view
}

export function isHighlighted(view: SessionView, objectId: number, now: number): boolean {
  const until = view.highlights[objectId]
  return until !== undefined && until > now
}

export function addNotice(view: SessionView, text: string): SessionView {
  return { ...view, notices: [...view.notices, text] }
}

export function shiftNotice(view: SessionView): SessionView {
  return view.notices.length ? { ...view, notices: view.notices.slice(1) } : view
}
