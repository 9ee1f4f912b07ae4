import { describe, expect, it } from 'vitest'

import {
  HIGHLIGHT_MS,
  addNotice,
  expireHighlights,
  initialView,
  isHighlighted,
  reduceFrame,
  setTranscript,
  shiftNotice,
} from '../src/state.js'
import type { ReplyFrame, SceneObjectView, StateFrame } from '../src/types.js'

function sceneObjects(installed504 = false): SceneObjectView[] {
  return [
    {
      id: 504,
      kind: 'panel',
      name: 'Drywall panel 504',
      size_ft: [4, 4],
      area_label: null,
      allowed_panel_size: null,
      installed_on: installed504 ? 606 : null,
      occupied_by: null,
      destination: false,
    },
    {
      id: 606,
      kind: 'stud',
      name: 'Stud 606',
      size_ft: null,
      area_label: 'second_rightmost',
      allowed_panel_size: [4, 4],
      installed_on: null,
      occupied_by: installed504 ? 504 : null,
      destination: true,
    },
  ]
}

function stateFrame(overrides: Partial<StateFrame> = {}): StateFrame {
  return {
    type: 'state',
    session: 's1',
    state: 'awaiting_instruction',
    approve_enabled: false,
    pending_task: null,
    pending_selections: {},
    elapsed_s: 12.5,
    scene: { objects: sceneObjects() },
    ...overrides,
  }
}

describe('state frames', () => {
  it('mirrors the server scene snapshot', () => {
    const view = reduceFrame(initialView('s1'), stateFrame(), 0)
    expect(view.scene).toHaveLength(2)
    expect(view.state).toBe('awaiting_instruction')
    expect(view.elapsedS).toBe(12.5)
  })

  it('enables approve only when the server says ready_for_approval', () => {
    let view = initialView('s1')
    expect(view.approveEnabled).toBe(false)
    view = reduceFrame(
      view,
      stateFrame({ state: 'awaiting_confirmation', pending_task: [504, 606] }),
      0,
    )
    expect(view.approveEnabled).toBe(false)
    view = reduceFrame(
      view,
      stateFrame({
        state: 'ready_for_approval',
        approve_enabled: true,
        pending_task: [504, 606],
      }),
      0,
    )
    expect(view.approveEnabled).toBe(true)
    expect(view.pendingTask).toEqual([504, 606])
  })

  it('reply and robot frames never flip approve enablement', () => {
    let view = reduceFrame(initialView('s1'), stateFrame(), 0)
    view = reduceFrame(view, { type: 'reply', kind: 'acknowledge', text: 'OKAY!!!', cited_ids: [null, null], category: null }, 0)
    view = reduceFrame(
      view,
      { type: 'robot', phase: 'done', target_id: 504, destination_id: 606, sequence: 4, detail: '' },
      0,
    )
    expect(view.approveEnabled).toBe(false)
  })

  it('marks the view busy while dispatching or waiting on the assistant', () => {
    let view = reduceFrame(initialView('s1'), stateFrame({ state: 'dispatching', pending_task: [504, 606] }), 0)
    expect(view.busy).toBe(true)
    view = reduceFrame(view, stateFrame({ state: 'assistant_pending' }), 0)
    expect(view.busy).toBe(true)
    view = reduceFrame(view, stateFrame(), 0)
    expect(view.busy).toBe(false)
  })

  it('selection badges come from the server, latest wins upstream', () => {
    const view = reduceFrame(
      initialView('s1'),
      stateFrame({ pending_selections: { target: 502 } }),
      0,
    )
    expect(view.pendingSelections).toEqual({ target: 502 })
  })

  it('shows the installed panel after the done state frame', () => {
    const frame = stateFrame({ scene: { objects: sceneObjects(true) } })
    const view = reduceFrame(initialView('s1'), frame, 0)
    const stud = view.scene.find((o) => o.id === 606)!
    expect(stud.occupied_by).toBe(504)
  })
})

describe('reply frames', () => {
  it('appends robot replies to the transcript', () => {
    let view = initialView('s1')
    view = reduceFrame(view, { type: 'reply', kind: 'reask', text: 'How can I assist you further?', cited_ids: [null, null], category: null }, 0)
    expect(view.transcript).toEqual([
      { speaker: 'robot', text: 'How can I assist you further?' },
    ])
  })

  it('drops a duplicate of the latest robot line', () => {
    let view = initialView('s1')
    const frame: ReplyFrame = {
      type: 'reply',
      kind: 'reask',
      text: 'OKAY!!!',
      cited_ids: [null, null],
      category: null,
    }
    view = reduceFrame(view, frame, 0)
    view = reduceFrame(view, frame, 0)
    expect(view.transcript).toHaveLength(1)
  })

  it('is replaced wholesale by the canonical transcript', () => {
    let view = initialView('s1')
    view = reduceFrame(view, { type: 'reply', kind: 'reask', text: 'hello', cited_ids: [null, null], category: null }, 0)
    view = setTranscript(view, [
      { speaker: 'user', text: 'Panel 504 to stud 606.' },
      { speaker: 'robot', text: 'Is the information correct?' },
    ])
    expect(view.transcript.map((e) => e.speaker)).toEqual(['user', 'robot'])
  })
})

describe('highlights', () => {
  it('flags the clicked object for a bounded time', () => {
    let view = initialView('s1')
    view = reduceFrame(view, { type: 'highlight', object_id: 504, role: 'target' }, 1000)
    expect(isHighlighted(view, 504, 1000 + HIGHLIGHT_MS - 1)).toBe(true)
    expect(isHighlighted(view, 504, 1000 + HIGHLIGHT_MS + 1)).toBe(false)
  })

  it('expire drops stale highlights only', () => {
    let view = initialView('s1')
    view = reduceFrame(view, { type: 'highlight', object_id: 504, role: 'target' }, 0)
    view = reduceFrame(view, { type: 'highlight', object_id: 606, role: 'destination' }, 1000)
    view = expireHighlights(view, HIGHLIGHT_MS + 1)
    expect(isHighlighted(view, 504, HIGHLIGHT_MS + 1)).toBe(false)
    expect(isHighlighted(view, 606, HIGHLIGHT_MS + 1)).toBe(true)
  })
})

describe('robot frames and notices', () => {
  it('tracks phases and reports completion', () => {
    let view = initialView('s1')
    for (const phase of ['accepted', 'picking', 'placing', 'done']) {
      view = reduceFrame(
        view,
        { type: 'robot', phase, target_id: 504, destination_id: 606, sequence: 1, detail: '' },
        0,
      )
      expect(view.robotPhase).toBe(phase)
    }
    expect(view.notices).toEqual(['Panel 504 installed on stud 606'])
  })

  it('reports failure without touching the scene snapshot', () => {
    let view = reduceFrame(initialView('s1'), stateFrame(), 0)
    const before = view.scene
    view = reduceFrame(
      view,
      { type: 'robot', phase: 'failed', target_id: 504, destination_id: 606, sequence: 4, detail: 'gripper fault' },
      0,
    )
    expect(view.scene).toBe(before)
    expect(view.notices[0]).toContain('Task failed')
  })

  it('notices queue and shift in order', () => {
    let view = initialView('s1')
    view = addNotice(view, 'one')
    view = addNotice(view, 'two')
    view = shiftNotice(view)
    expect(view.notices).toEqual(['two'])
  })
})
