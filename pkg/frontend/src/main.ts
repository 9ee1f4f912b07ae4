import { ApiError, approve, createSession, fetchSession, selectObject, sendMessage } from './api.js'
import { render } from './render.js'
import {
  addNotice,
  expireHighlights,
  initialView,
  reduceFrame,
  setTranscript,
  shiftNotice,
} from './state.js'
import type { SessionView } from './types.js'
import { connectEvents } from './ws.js'

let view: SessionView

function paint(): void {
  render(view, Date.now(), { onObjectClick: handleObjectClick })
}

async function refreshTranscript(): Promise<void> {
  const snapshot = await fetchSession(view.sessionId)
  view = setTranscript(view, snapshot.transcript)
  paint()
}

function notify(text: string): void {
  view = addNotice(view, text)
  paint()
  setTimeout(() => {
    view = shiftNotice(view)
    paint()
  }, 4000)
}

async function handleObjectClick(objectId: number): Promise<void> {
  try {
    await selectObject(view.sessionId, objectId)
    // the highlight itself arrives over the event stream
  } catch (error) {
    notify(error instanceof ApiError ? error.message : String(error))
  }
}

async function handleSend(): Promise<void> {
  const input = document.getElementById('utterance') as HTMLInputElement
  try {
    await sendMessage(view.sessionId, input.value)
    input.value = ''
    await refreshTranscript()
  } catch (error) {
    // the typed text stays in the field when the session is busy
    notify(error instanceof ApiError ? error.message : String(error))
  }
}

async function handleApprove(): Promise<void> {
  try {
    await approve(view.sessionId)
    await refreshTranscript()
  } catch (error) {
    notify(error instanceof ApiError ? error.message : String(error))
  }
}

async function boot(): Promise<void> {
  const created = await createSession()
  view = initialView(created.id)
  paint()

  connectEvents(
    created.id,
    (frame) => {
      view = reduceFrame(view, frame, Date.now())
      paint()
      if (frame.type === 'reply' || (frame.type === 'robot' && frame.phase === 'done')) {
        void refreshTranscript()
      }
    },
    () => notify('event stream closed; reload the page'),
  )
  await refreshTranscript()

  document.getElementById('send')!.addEventListener('click', () => void handleSend())
  document.getElementById('utterance')!.addEventListener('keydown', (event) => {
    if ((event as KeyboardEvent).key === 'Enter') void handleSend()
  })
  document.getElementById('approve')!.addEventListener('click', () => void handleApprove())

  setInterval(() => {
    view = expireHighlights(view, Date.now())
    paint()
  }, 400)
}

void boot()
